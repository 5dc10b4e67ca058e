/**
 * Max-pooling over valid token positions.
 */

/**
 * Coordinate-wise maximum over the first `count` rows of a row-major
 * token matrix. Rows past `count` (padding or scratch space) are never
 * read, so appending padding cannot change the result.
 */
export function maxPoolValid(tokens: Float32Array, count: number, dim: number): Float32Array {
  if (!Number.isInteger(count) || count < 1) {
    throw new Error(`cannot pool an empty sequence (count = ${count})`)
  }
  if (!Number.isInteger(dim) || dim < 1) {
    throw new Error(`invalid dimensionality ${dim}`)
  }
  if (tokens.length < count * dim) {
    throw new Error(
      `token matrix has ${tokens.length} values, need at least ${count * dim}`,
    )
  }
  const pooled = new Float32Array(tokens.subarray(0, dim))
  for (let t = 1; t < count; t++) {
    const base = t * dim
    for (let j = 0; j < dim; j++) {
      const v = tokens[base + j]!
      if (v > pooled[j]!) {
        pooled[j] = v
      }
    }
  }
  return pooled
}
