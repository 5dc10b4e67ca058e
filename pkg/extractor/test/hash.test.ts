import { describe, expect, it } from 'vitest'

import { HashEncoder, tokenize } from '../src/encoders/hash.js'

describe('tokenize', () => {
  it('lowercases and keeps entity markers whole', () => {
    expect(tokenize('[E1] Alice [/E1] met [E2] Bob [/E2]')).toEqual([
      '[e1]', 'alice', '[/e1]', 'met', '[e2]', 'bob', '[/e2]',
    ])
  })

  it('splits on punctuation and keeps apostrophes', () => {
    expect(tokenize("don't stop, it's 5pm!")).toEqual(["don't", 'stop', "it's", '5pm'])
  })
})

describe('HashEncoder', () => {
  it('gives identical texts identical token states', async () => {
    const enc = new HashEncoder(32)
    const [a, b] = await enc.encodeBatch(['play some jazz', 'play some jazz'], 64)
    expect(a!.count).toBe(b!.count)
    expect([...a!.vectors]).toEqual([...b!.vectors])
  })

  it('gives repeated tokens identical rows', async () => {
    const enc = new HashEncoder(16)
    const [emb] = await enc.encodeBatch(['echo echo'], 64)
    expect(emb!.count).toBe(2)
    expect([...emb!.vectors.subarray(0, 16)]).toEqual([...emb!.vectors.subarray(16, 32)])
  })

  it('is stable across encoder instances', async () => {
    const [a] = await new HashEncoder(16).encodeBatch(['stable feature'], 64)
    const [b] = await new HashEncoder(16).encodeBatch(['stable feature'], 64)
    expect([...a!.vectors]).toEqual([...b!.vectors])
  })

  it('truncates at maxLength and flags it', async () => {
    const enc = new HashEncoder(8)
    const [emb] = await enc.encodeBatch(['one two three four five'], 3)
    expect(emb!.count).toBe(3)
    expect(emb!.truncated).toBe(true)
    const [whole] = await enc.encodeBatch(['one two three'], 8)
    expect(whole!.truncated).toBe(false)
    expect([...emb!.vectors]).toEqual([...whole!.vectors])
  })

  it('keeps features bounded in [-1, 1]', async () => {
    const enc = new HashEncoder(64)
    const [emb] = await enc.encodeBatch(['a varied bag of feature words'], 64)
    for (const v of emb!.vectors) {
      expect(Math.abs(v)).toBeLessThanOrEqual(1)
    }
  })

  it('rejects texts with no tokens and bad dimensions', async () => {
    const enc = new HashEncoder(8)
    await expect(enc.encodeBatch(['!!!'], 8)).rejects.toThrow(/no tokens/)
    expect(() => new HashEncoder(0)).toThrow(/dimensionality/)
  })
})
