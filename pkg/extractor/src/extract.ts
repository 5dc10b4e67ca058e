/**
 * Extraction pipeline: JSONL text records to an EMB1 embedding file.
 *
 * Records are encoded in batches but written strictly in input order,
 * one pooled vector per record. Labels are numbered by first
 * appearance so the class-name list in the sidecar lines up with the
 * label ids in the binary file.
 */

import { readFile } from 'fs/promises'
import { basename } from 'path'

import type { Encoder } from './encoder.js'
import { maxPoolValid } from './pooling.js'
import { injectMarkers } from './markers.js'
import { parseJsonl, type TextRecord } from './jsonl.js'
import { writeEmb1, type Emb1Data, type Emb1Meta } from './emb1.js'

export interface ExtractOptions {
  encoder: Encoder
  batchSize?: number
  maxLength?: number
  split?: string
  source?: string
  log?: (message: string) => void
}

export interface ExtractResult {
  data: Emb1Data
  meta: Emb1Meta
  classNames: string[]
  truncated: number
}

export async function extractRecords(
  records: TextRecord[],
  options: ExtractOptions,
): Promise<ExtractResult> {
  const { encoder } = options
  const batchSize = options.batchSize ?? 32
  const maxLength = options.maxLength ?? 128
  const log = options.log ?? ((message) => console.warn(message))
  if (records.length === 0) {
    throw new Error('empty dataset: nothing to extract')
  }
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new Error(`invalid batch size ${batchSize}`)
  }
  if (!Number.isInteger(maxLength) || maxLength < 1) {
    throw new Error(`invalid max length ${maxLength}`)
  }

  const classIds = new Map<string, number>()
  const labels = new Uint32Array(records.length)
  for (let i = 0; i < records.length; i++) {
    const label = records[i]!.label
    let id = classIds.get(label)
    if (id === undefined) {
      id = classIds.size
      classIds.set(label, id)
    }
    labels[i] = id
  }

  const texts = records.map((record) => injectMarkers(record))
  const d = encoder.dim
  const vectors = new Float32Array(records.length * d)
  let truncated = 0
  for (let start = 0; start < texts.length; start += batchSize) {
    const batch = texts.slice(start, start + batchSize)
    const encoded = await encoder.encodeBatch(batch, maxLength)
    if (encoded.length !== batch.length) {
      throw new Error(
        `encoder returned ${encoded.length} embeddings for ${batch.length} texts`,
      )
    }
    for (let j = 0; j < encoded.length; j++) {
      const tok = encoded[j]!
      if (tok.truncated) {
        truncated++
      }
      vectors.set(maxPoolValid(tok.vectors, tok.count, d), (start + j) * d)
    }
  }
  if (truncated > 0) {
    log(`truncated ${truncated} of ${records.length} texts at ${maxLength} tokens`)
  }

  const classNames = [...classIds.keys()]
  return {
    data: { vectors, labels, n: records.length, d, k: classNames.length },
    meta: {
      class_names: classNames,
      source: options.source ?? '',
      encoder: encoder.name,
      split: options.split ?? '',
    },
    classNames,
    truncated,
  }
}

export async function extractFile(
  inputPath: string,
  outputPath: string,
  options: ExtractOptions,
): Promise<ExtractResult> {
  const content = await readFile(inputPath, 'utf-8')
  const records = parseJsonl(content)
  const result = await extractRecords(records, {
    ...options,
    source: options.source ?? `jsonl:${basename(inputPath)}`,
  })
  await writeEmb1(outputPath, result.data, result.meta)
  return result
}
