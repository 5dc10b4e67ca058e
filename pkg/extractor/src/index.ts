export { decodeEmb1, encodeEmb1, writeEmb1, FORMAT_VERSION, MAGIC } from './emb1.js'
export type { Emb1Data, Emb1Meta } from './emb1.js'
export type { Encoder, TokenEmbedding } from './encoder.js'
export { HashEncoder, tokenize } from './encoders/hash.js'
export { DEFAULT_MODEL, loadTransformerEncoder } from './encoders/transformers.js'
export { extractFile, extractRecords } from './extract.js'
export type { ExtractOptions, ExtractResult } from './extract.js'
export { parseJsonl } from './jsonl.js'
export type { Span, TextRecord } from './jsonl.js'
export { injectMarkers, MARKER_TOKENS } from './markers.js'
export { maxPoolValid } from './pooling.js'
