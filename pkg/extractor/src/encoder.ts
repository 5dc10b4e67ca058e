/**
 * Encoder contract: text in, per-token vectors out.
 *
 * Pooling is owned by the caller, so an encoder only reports the token
 * states it actually computed. Padding never appears in the output:
 * `vectors` holds exactly `count * dim` values.
 */

export interface TokenEmbedding {
  /** Row-major token states, count x dim. */
  vectors: Float32Array
  /** Number of real (non-padding) tokens. */
  count: number
  /** True when the input was cut at maxLength tokens. */
  truncated: boolean
}

export interface Encoder {
  /** Stable name recorded in the output manifest. */
  readonly name: string
  /** Dimensionality of each token state. */
  readonly dim: number
  encodeBatch(texts: string[], maxLength: number): Promise<TokenEmbedding[]>
}
