import { describe, expect, it } from 'vitest'

import { parseJsonl } from '../src/jsonl.js'

describe('parseJsonl', () => {
  it('parses records and optional spans', () => {
    const content = [
      '{"text": "book a table", "label": "restaurant"}',
      '',
      '{"text": "alice met bob", "label": "met", "head_span": [0, 5], "tail_span": [10, 13]}',
      '   ',
    ].join('\n')
    const records = parseJsonl(content)
    expect(records).toHaveLength(2)
    expect(records[0]).toEqual({ text: 'book a table', label: 'restaurant' })
    expect(records[1]!.headSpan).toEqual([0, 5])
    expect(records[1]!.tailSpan).toEqual([10, 13])
  })

  it('reports the line number for invalid JSON', () => {
    expect(() => parseJsonl('{"text": "a", "label": "b"}\nnot json')).toThrow(/line 2/)
  })

  it('rejects non-object lines', () => {
    expect(() => parseJsonl('[1, 2]')).toThrow(/object/)
  })

  it('rejects empty or missing text', () => {
    expect(() => parseJsonl('{"text": "  ", "label": "x"}')).toThrow(/"text"/)
    expect(() => parseJsonl('{"label": "x"}')).toThrow(/"text"/)
  })

  it('rejects missing labels', () => {
    expect(() => parseJsonl('{"text": "hello"}')).toThrow(/"label"/)
    expect(() => parseJsonl('{"text": "hello", "label": 3}')).toThrow(/"label"/)
  })

  it('rejects malformed or out-of-range spans', () => {
    expect(() => parseJsonl('{"text": "abc", "label": "x", "head_span": [0]}')).toThrow(
      /integer pair/,
    )
    expect(() => parseJsonl('{"text": "abc", "label": "x", "head_span": [1, 9]}')).toThrow(
      /out of range/,
    )
    expect(() => parseJsonl('{"text": "abc", "label": "x", "tail_span": [2, 2]}')).toThrow(
      /out of range/,
    )
  })
})
