// Ranking for the keyboard-first label pickers. Options always come from the
// gateway catalog; this module never invents strings of its own.

export function rankMatches(options: string[], query: string, limit = 8): string[] {
  const q = query.trim().toLowerCase();
  if (q === "") return options.slice(0, limit);
  const prefix: string[] = [];
  const substring: string[] = [];
  for (const opt of options) {
    const low = opt.toLowerCase();
    if (low.startsWith(q)) prefix.push(opt);
    else if (low.includes(q)) substring.push(opt);
  }
  return prefix.concat(substring).slice(0, limit);
}

export function isExactOption(options: string[], value: string): boolean {
  return options.includes(value);
}

export interface TypeaheadHooks {
  /** Called whenever the suggestion list changes. */
  onSuggestions(items: string[]): void;
  /** Called when the user commits a value that is a real catalog option. */
  onCommit(value: string): void;
}

/** Keyboard state machine for one picker: tracks the highlighted suggestion
 * and only ever commits strings present in the option list. */
export class Typeahead {
  private options: string[] = [];
  private suggestions: string[] = [];
  private highlighted = -1;
  private committed: string | null = null;

  constructor(
    private hooks: TypeaheadHooks,
    private limit = 8,
  ) {}

  setOptions(options: string[]): void {
    this.options = options.slice();
    if (this.committed !== null && !this.options.includes(this.committed)) {
      this.committed = null;
    }
  }

  get value(): string | null {
    return this.committed;
  }

  input(query: string): void {
    this.committed = isExactOption(this.options, query) ? query : null;
    this.suggestions = rankMatches(this.options, query, this.limit);
    this.highlighted = this.suggestions.length > 0 ? 0 : -1;
    this.hooks.onSuggestions(this.suggestions);
  }

  moveHighlight(delta: number): void {
    if (this.suggestions.length === 0) return;
    const n = this.suggestions.length;
    this.highlighted = (this.highlighted + delta + n) % n;
  }

  get highlightedValue(): string | null {
    return this.highlighted >= 0 ? this.suggestions[this.highlighted] : null;
  }

  /** Enter key: commit the highlighted suggestion, if any. */
  commitHighlighted(): boolean {
    const value = this.highlightedValue;
    if (value === null) return false;
    this.committed = value;
    this.suggestions = [];
    this.highlighted = -1;
    this.hooks.onSuggestions([]);
    this.hooks.onCommit(value);
    return true;
  }

  clear(): void {
    this.committed = null;
    this.suggestions = [];
    this.highlighted = -1;
    this.hooks.onSuggestions([]);
  }
}
