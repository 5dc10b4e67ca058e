/**
 * Deterministic offline encoder: hashed random token features.
 *
 * Each distinct token maps to a fixed pseudo-random vector derived from
 * its hash, so the encoder needs no model files and identical texts
 * always produce identical embeddings. Max-pooled, these behave like a
 * bag-of-words signature in a dense space; they are a stand-in for a
 * real sentence encoder, not a replacement.
 */

import type { Encoder, TokenEmbedding } from '../encoder.js'

// entity markers like [E1] survive tokenization as single tokens
const TOKEN_PATTERN = /\[\/?e\d\]|[a-z0-9']+/g

export function tokenize(text: string): string[] {
  return text.toLowerCase().match(TOKEN_PATTERN) ?? []
}

function fnv1a(text: string): number {
  let hash = 0x811c9dc5
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i)
    hash = Math.imul(hash, 0x01000193)
  }
  return hash >>> 0
}

// mulberry32: tiny seeded generator, plenty for feature hashing
function mulberry32(seed: number): () => number {
  let state = seed >>> 0
  return () => {
    state = (state + 0x6d2b79f5) >>> 0
    let z = state
    z = Math.imul(z ^ (z >>> 15), z | 1)
    z ^= z + Math.imul(z ^ (z >>> 7), z | 61)
    return ((z ^ (z >>> 14)) >>> 0) / 4294967296
  }
}

export class HashEncoder implements Encoder {
  readonly name: string
  readonly dim: number
  private cache = new Map<string, Float32Array>()

  constructor(dim = 256) {
    if (!Number.isInteger(dim) || dim < 1) {
      throw new Error(`invalid hash encoder dimensionality ${dim}`)
    }
    this.dim = dim
    this.name = `hash-${dim}`
  }

  private tokenVector(token: string): Float32Array {
    let vec = this.cache.get(token)
    if (!vec) {
      const next = mulberry32(fnv1a(token))
      vec = new Float32Array(this.dim)
      for (let j = 0; j < this.dim; j++) {
        vec[j] = 2 * next() - 1
      }
      this.cache.set(token, vec)
    }
    return vec
  }

  async encodeBatch(texts: string[], maxLength: number): Promise<TokenEmbedding[]> {
    return texts.map((text) => {
      const tokens = tokenize(text)
      if (tokens.length === 0) {
        throw new Error(`no tokens in text: ${JSON.stringify(text)}`)
      }
      const truncated = tokens.length > maxLength
      const kept = truncated ? tokens.slice(0, maxLength) : tokens
      const vectors = new Float32Array(kept.length * this.dim)
      for (let t = 0; t < kept.length; t++) {
        vectors.set(this.tokenVector(kept[t]!), t * this.dim)
      }
      return { vectors, count: kept.length, truncated }
    })
  }
}
