#!/usr/bin/env python3
"""Generate a synthetic labeled corpus plus matching lexicon files.

Writes corpus.jsonl, negatory.txt and emphasizers.txt into --out-dir, ready for
the opmine train/evaluate commands.
"""

import argparse
from pathlib import Path

from opmine.corpus import save_corpus
from opmine.synthetic import EMPHASIZER_WORDS, NEGATORY_WORDS, generate_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("data"))
    parser.add_argument("--n-posts", type=int, default=300)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--shared-fraction", type=float, default=0.2,
                        help="fraction of each class vocabulary shared across classes")
    parser.add_argument("--rule-word-prob", type=float, default=0.05,
                        help="chance of planting a negation/emphasis word before a token")
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    corpus = generate_corpus(
        n_posts=args.n_posts,
        seed=args.seed,
        shared_fraction=args.shared_fraction,
        rule_word_prob=args.rule_word_prob,
    )
    corpus_path = args.out_dir / "corpus.jsonl"
    save_corpus(corpus, corpus_path)
    (args.out_dir / "negatory.txt").write_text(
        "\n".join(sorted(NEGATORY_WORDS)) + "\n", encoding="utf-8"
    )
    (args.out_dir / "emphasizers.txt").write_text(
        "\n".join(sorted(EMPHASIZER_WORDS)) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(corpus)} posts to {corpus_path} (+ rule lexicons)")


if __name__ == "__main__":
    main()
