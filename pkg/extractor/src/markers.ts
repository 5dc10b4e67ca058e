/**
 * Entity marker injection for relation-classification inputs.
 *
 * Head and tail spans are wrapped in bracket tokens so the encoder can
 * tell which mentions the relation connects. Offsets refer to the
 * original text; spans must not overlap.
 */

import type { TextRecord } from './jsonl.js'

export const HEAD_OPEN = '[E1]'
export const HEAD_CLOSE = '[/E1]'
export const TAIL_OPEN = '[E2]'
export const TAIL_CLOSE = '[/E2]'

/** Marker strings an encoder should register as special tokens. */
export const MARKER_TOKENS = [HEAD_OPEN, HEAD_CLOSE, TAIL_OPEN, TAIL_CLOSE]

/** Wrap the record's spans in entity markers, later span first so offsets stay valid. */
export function injectMarkers(record: TextRecord): string {
  const spans: Array<{ span: [number, number]; open: string; close: string }> = []
  if (record.headSpan) {
    spans.push({ span: record.headSpan, open: HEAD_OPEN, close: HEAD_CLOSE })
  }
  if (record.tailSpan) {
    spans.push({ span: record.tailSpan, open: TAIL_OPEN, close: TAIL_CLOSE })
  }
  if (spans.length === 0) {
    return record.text
  }
  spans.sort((a, b) => a.span[0] - b.span[0])
  if (spans.length === 2 && spans[0]!.span[1] > spans[1]!.span[0]) {
    throw new Error(
      `entity spans overlap: [${spans[0]!.span}] and [${spans[1]!.span}]`,
    )
  }
  let text = record.text
  for (const { span, open, close } of spans.reverse()) {
    const [start, end] = span
    text =
      text.slice(0, start) +
      `${open} ${text.slice(start, end)} ${close}` +
      text.slice(end)
  }
  return text
}
