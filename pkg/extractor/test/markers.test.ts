import { describe, expect, it } from 'vitest'

import { injectMarkers } from '../src/markers.js'

describe('injectMarkers', () => {
  it('returns the text unchanged without spans', () => {
    expect(injectMarkers({ text: 'plain utterance', label: 'x' })).toBe('plain utterance')
  })

  it('wraps head and tail spans', () => {
    const text = 'alice met bob yesterday'
    const marked = injectMarkers({
      text,
      label: 'met',
      headSpan: [0, 5],
      tailSpan: [10, 13],
    })
    expect(marked).toBe('[E1] alice [/E1] met [E2] bob [/E2] yesterday')
  })

  it('handles the tail mention appearing first', () => {
    const marked = injectMarkers({
      text: 'bob met alice',
      label: 'met',
      headSpan: [8, 13],
      tailSpan: [0, 3],
    })
    expect(marked).toBe('[E2] bob [/E2] met [E1] alice [/E1]')
  })

  it('rejects overlapping spans', () => {
    expect(() =>
      injectMarkers({
        text: 'overlapping words here',
        label: 'x',
        headSpan: [0, 11],
        tailSpan: [4, 16],
      }),
    ).toThrow(/overlap/)
  })
})
