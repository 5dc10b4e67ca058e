/**
 * JSONL input parsing for text classification records.
 *
 * One JSON object per line with required "text" and "label" fields.
 * Relation-classification inputs may add "head_span" / "tail_span"
 * as [start, end) character offsets into the text.
 */

export type Span = [number, number]

export interface TextRecord {
  text: string
  label: string
  headSpan?: Span
  tailSpan?: Span
}

function parseSpan(raw: unknown, text: string, field: string, line: number): Span {
  if (
    !Array.isArray(raw) ||
    raw.length !== 2 ||
    !Number.isInteger(raw[0]) ||
    !Number.isInteger(raw[1])
  ) {
    throw new Error(`line ${line}: ${field} must be an integer pair [start, end)`)
  }
  const [start, end] = raw as [number, number]
  if (start < 0 || end > text.length || start >= end) {
    throw new Error(
      `line ${line}: ${field} [${start}, ${end}) out of range for text of length ${text.length}`,
    )
  }
  return [start, end]
}

/** Parse JSONL content; blank lines are skipped, anything else must be valid. */
export function parseJsonl(content: string): TextRecord[] {
  const records: TextRecord[] = []
  const lines = content.split('\n')
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim()
    if (line === '') {
      continue
    }
    const lineNo = i + 1
    let raw: unknown
    try {
      raw = JSON.parse(line)
    } catch (err) {
      throw new Error(`line ${lineNo}: invalid JSON (${(err as Error).message})`)
    }
    if (typeof raw !== 'object' || raw === null || Array.isArray(raw)) {
      throw new Error(`line ${lineNo}: expected a JSON object`)
    }
    const obj = raw as Record<string, unknown>
    if (typeof obj.text !== 'string' || obj.text.trim() === '') {
      throw new Error(`line ${lineNo}: "text" must be a non-empty string`)
    }
    if (typeof obj.label !== 'string' || obj.label === '') {
      throw new Error(`line ${lineNo}: "label" must be a non-empty string`)
    }
    const record: TextRecord = { text: obj.text, label: obj.label }
    if (obj.head_span !== undefined) {
      record.headSpan = parseSpan(obj.head_span, obj.text, 'head_span', lineNo)
    }
    if (obj.tail_span !== undefined) {
      record.tailSpan = parseSpan(obj.tail_span, obj.text, 'tail_span', lineNo)
    }
    records.push(record)
  }
  return records
}
