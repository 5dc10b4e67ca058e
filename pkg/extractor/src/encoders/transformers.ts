/**
 * Pretrained transformer encoder via @huggingface/transformers.
 *
 * Loaded lazily: the package and the model weights are only needed
 * when this encoder is actually selected. Texts are run one at a time
 * (batching groups work but never pads a sequence), so every returned
 * token state is real and pooling over all of them already excludes
 * padding. Entity markers are passed through as literal bracket text;
 * wordpiece splits them consistently, which keeps spans delimited.
 */

import type { Encoder, TokenEmbedding } from '../encoder.js'

export const DEFAULT_MODEL = 'Xenova/bert-base-uncased'

interface FeaturePipeline {
  (text: string, options: Record<string, unknown>): Promise<{
    data: Float32Array | number[]
    dims: number[]
  }>
}

class TransformerEncoder implements Encoder {
  readonly name: string
  readonly dim: number
  private pipe: FeaturePipeline

  constructor(name: string, dim: number, pipe: FeaturePipeline) {
    this.name = name
    this.dim = dim
    this.pipe = pipe
  }

  async encodeBatch(texts: string[], maxLength: number): Promise<TokenEmbedding[]> {
    const out: TokenEmbedding[] = []
    for (const text of texts) {
      const result = await this.pipe(text, {
        pooling: 'none',
        truncation: true,
        max_length: maxLength,
      })
      const dims = result.dims
      const count = dims[dims.length - 2]!
      const dim = dims[dims.length - 1]!
      if (dim !== this.dim) {
        throw new Error(`encoder returned width ${dim}, expected ${this.dim}`)
      }
      out.push({
        vectors: Float32Array.from(result.data as ArrayLike<number>),
        count,
        // the pipeline truncates silently; flag by re-checking length
        truncated: count >= maxLength,
      })
    }
    return out
  }
}

/**
 * Load a feature-extraction pipeline and wrap it as an Encoder.
 *
 * Fails with an actionable message when the package is not installed
 * or the model weights are not available locally.
 */
export async function loadTransformerEncoder(model = DEFAULT_MODEL): Promise<Encoder> {
  // computed specifier keeps the dependency optional at compile time
  const packageName = '@huggingface/transformers'
  let mod: { pipeline: (task: string, model: string) => Promise<unknown> }
  try {
    mod = await import(packageName)
  } catch (err) {
    throw new Error(
      `encoder "${model}" needs the ${packageName} package ` +
        `(npm install ${packageName}); import failed: ${(err as Error).message}`,
    )
  }
  let pipe: FeaturePipeline
  try {
    pipe = (await mod.pipeline('feature-extraction', model)) as FeaturePipeline
  } catch (err) {
    throw new Error(
      `failed to load encoder "${model}" (weights must be cached locally): ` +
        `${(err as Error).message}`,
    )
  }
  const probe = await pipe('dimension probe', { pooling: 'none' })
  const dim = probe.dims[probe.dims.length - 1]!
  return new TransformerEncoder(model, dim, pipe)
}
