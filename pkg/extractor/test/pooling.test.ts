import { describe, expect, it } from 'vitest'

import { maxPoolValid } from '../src/pooling.js'

describe('maxPoolValid', () => {
  it('takes the coordinate-wise maximum over valid rows', () => {
    const tokens = Float32Array.of(
      1, -2, 0.5,
      3, -5, 0.25,
      2, -1, 0.75,
    )
    expect([...maxPoolValid(tokens, 3, 3)]).toEqual([3, -1, 0.75])
  })

  it('is unchanged by appended padding rows', () => {
    const real = Float32Array.from({ length: 4 * 8 }, (_, i) => Math.sin(i))
    const padded = new Float32Array(7 * 8)
    padded.set(real)
    padded.fill(9999, 4 * 8) // padding junk that max would otherwise pick up
    const a = maxPoolValid(real, 4, 8)
    const b = maxPoolValid(padded, 4, 8)
    for (let j = 0; j < 8; j++) {
      expect(Math.abs(a[j]! - b[j]!)).toBeLessThan(1e-5)
    }
    expect([...b]).toEqual([...a])
  })

  it('pools a single token to itself', () => {
    const tokens = Float32Array.of(0.125, -0.5)
    expect([...maxPoolValid(tokens, 1, 2)]).toEqual([0.125, -0.5])
  })

  it('rejects empty sequences and short matrices', () => {
    expect(() => maxPoolValid(new Float32Array(0), 0, 4)).toThrow(/empty/)
    expect(() => maxPoolValid(new Float32Array(4), 2, 4)).toThrow(/need at least/)
    expect(() => maxPoolValid(new Float32Array(4), 1, 0)).toThrow(/dimensionality/)
  })
})
