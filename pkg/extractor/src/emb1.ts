/**
 * EMB1 binary embedding files.
 *
 * Layout (little-endian): "EMB1" magic, u32 version, u32 n, u32 d,
 * u32 k, then n u32 labels, then n*d f32 vectors row-major. A JSON
 * sidecar at <file>.meta.json carries class names and provenance.
 */

import { writeFile } from 'fs/promises'

export const MAGIC = 'EMB1'
export const FORMAT_VERSION = 1
const HEADER_BYTES = 20

export interface Emb1Data {
  vectors: Float32Array // row-major, n * d values
  labels: Uint32Array
  n: number
  d: number
  k: number
}

export interface Emb1Meta {
  class_names: string[] | null
  source: string
  encoder: string
  split: string
}

export function encodeEmb1(data: Emb1Data): Uint8Array {
  const { vectors, labels, n, d, k } = data
  if (n < 1 || d < 1 || k < 1) {
    throw new Error(`refusing to write an empty dataset (n=${n}, d=${d}, k=${k})`)
  }
  if (labels.length !== n || vectors.length !== n * d) {
    throw new Error(
      `shape mismatch: ${labels.length} labels and ${vectors.length} values for n=${n}, d=${d}`,
    )
  }
  for (let i = 0; i < n; i++) {
    if (labels[i]! >= k) {
      throw new Error(`label ${labels[i]} at row ${i} out of range for k=${k}`)
    }
  }
  for (let i = 0; i < vectors.length; i++) {
    if (!Number.isFinite(vectors[i]!)) {
      throw new Error(`non-finite value at position ${i}`)
    }
  }
  const buf = new Uint8Array(HEADER_BYTES + 4 * n + 4 * n * d)
  const view = new DataView(buf.buffer)
  for (let i = 0; i < MAGIC.length; i++) {
    buf[i] = MAGIC.charCodeAt(i)
  }
  view.setUint32(4, FORMAT_VERSION, true)
  view.setUint32(8, n, true)
  view.setUint32(12, d, true)
  view.setUint32(16, k, true)
  let offset = HEADER_BYTES
  for (let i = 0; i < n; i++, offset += 4) {
    view.setUint32(offset, labels[i]!, true)
  }
  for (let i = 0; i < vectors.length; i++, offset += 4) {
    view.setFloat32(offset, vectors[i]!, true)
  }
  return buf
}

/** Reader for round-trip checks; the primary consumer is the Python toolkit. */
export function decodeEmb1(buf: Uint8Array): Emb1Data {
  if (buf.length < HEADER_BYTES) {
    throw new Error(`file too short (${buf.length} bytes)`)
  }
  const magic = String.fromCharCode(...buf.subarray(0, 4))
  if (magic !== MAGIC) {
    throw new Error(`bad magic ${JSON.stringify(magic)}`)
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength)
  const version = view.getUint32(4, true)
  if (version !== FORMAT_VERSION) {
    throw new Error(`unsupported version ${version}`)
  }
  const n = view.getUint32(8, true)
  const d = view.getUint32(12, true)
  const k = view.getUint32(16, true)
  const expected = HEADER_BYTES + 4 * n + 4 * n * d
  if (buf.length !== expected) {
    throw new Error(`expected ${expected} bytes for n=${n}, d=${d}, got ${buf.length}`)
  }
  const labels = new Uint32Array(n)
  const vectors = new Float32Array(n * d)
  let offset = HEADER_BYTES
  for (let i = 0; i < n; i++, offset += 4) {
    labels[i] = view.getUint32(offset, true)
  }
  for (let i = 0; i < n * d; i++, offset += 4) {
    vectors[i] = view.getFloat32(offset, true)
  }
  return { vectors, labels, n, d, k }
}

export async function writeEmb1(path: string, data: Emb1Data, meta?: Emb1Meta): Promise<void> {
  await writeFile(path, encodeEmb1(data))
  if (meta) {
    await writeFile(`${path}.meta.json`, JSON.stringify(meta, null, 2))
  }
}
