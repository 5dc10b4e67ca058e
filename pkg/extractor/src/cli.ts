#!/usr/bin/env node
/**
 * embed-extract: turn a JSONL text dataset into an EMB1 embedding file.
 *
 * Encoder names: "hash" or "hash-<dim>" for the offline hashed-feature
 * encoder, anything else is treated as a transformer model id.
 */

import { parseArgs } from 'util'
import { pathToFileURL } from 'url'

import type { Encoder } from './encoder.js'
import { HashEncoder } from './encoders/hash.js'
import { loadTransformerEncoder } from './encoders/transformers.js'
import { extractFile } from './extract.js'

const USAGE = `usage: embed-extract --input <records.jsonl> --out <file.emb> [options]

options:
  --input <path>       JSONL file with "text" and "label" fields (required)
  --out <path>         EMB1 output path (required)
  --encoder <name>     "hash", "hash-<dim>", or a transformer model id
                       (default: hash-256)
  --batch-size <n>     texts per encoder call (default: 32)
  --max-length <n>     token truncation limit (default: 128)
  --split <name>       split tag recorded in the sidecar (default: "")
`

async function resolveEncoder(name: string): Promise<Encoder> {
  if (name === 'hash') {
    return new HashEncoder()
  }
  const hashed = /^hash-(\d+)$/.exec(name)
  if (hashed) {
    return new HashEncoder(Number.parseInt(hashed[1]!, 10))
  }
  return loadTransformerEncoder(name)
}

function positiveInt(value: string, flag: string): number {
  const parsed = Number.parseInt(value, 10)
  if (!Number.isInteger(parsed) || parsed < 1 || String(parsed) !== value) {
    throw new Error(`${flag} must be a positive integer, got ${JSON.stringify(value)}`)
  }
  return parsed
}

export async function main(argv: string[]): Promise<number> {
  let values: Record<string, string | boolean | undefined>
  try {
    values = parseArgs({
      args: argv,
      options: {
        input: { type: 'string' },
        out: { type: 'string' },
        encoder: { type: 'string', default: 'hash-256' },
        'batch-size': { type: 'string', default: '32' },
        'max-length': { type: 'string', default: '128' },
        split: { type: 'string', default: '' },
        help: { type: 'boolean', default: false },
      },
      allowPositionals: false,
    }).values
  } catch (err) {
    process.stderr.write(`embed-extract: error: ${(err as Error).message}\n${USAGE}`)
    return 2
  }
  if (values.help) {
    process.stdout.write(USAGE)
    return 0
  }
  if (!values.input || !values.out) {
    process.stderr.write(`embed-extract: error: --input and --out are required\n${USAGE}`)
    return 2
  }
  try {
    const encoder = await resolveEncoder(values.encoder as string)
    const result = await extractFile(values.input as string, values.out as string, {
      encoder,
      batchSize: positiveInt(values['batch-size'] as string, '--batch-size'),
      maxLength: positiveInt(values['max-length'] as string, '--max-length'),
      split: values.split as string,
    })
    const { n, d, k } = result.data
    process.stdout.write(
      `wrote ${values.out}: ${n} rows, d=${d}, ${k} classes (${encoder.name})\n`,
    )
    return 0
  } catch (err) {
    process.stderr.write(`embed-extract: error: ${(err as Error).message}\n`)
    return 1
  }
}

const isDirectRun =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href
if (isDirectRun) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code
  })
}
