#!/usr/bin/env python3
"""Regenerates data/emoji.tsv from the `emoji` package (pip install emoji).

Each row is `<emoji sequence>\t:<name>:`. Names are folded to lowercase
ASCII so the classifier sees stable tokens.
"""
import re
import sys
import unicodedata
from pathlib import Path

import emoji

KEYCAP = {"#": "hash", "*": "asterisk"}


def fold(name: str) -> str:
    name = name.strip(":")
    if name.startswith("keycap_") and name[7:] in KEYCAP:
        name = "keycap_" + KEYCAP[name[7:]]
    name = unicodedata.normalize("NFKD", name)
    name = "".join(c for c in name if not unicodedata.combining(c)).lower()
    name = re.sub(r"[^a-z0-9_+\-]", "_", name)
    name = re.sub(r"_+", "_", name).strip("_")
    return f":{name}:"


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "data" / "emoji.tsv"
    rows = sorted((seq, fold(info["en"])) for seq, info in emoji.EMOJI_DATA.items())
    with out.open("w", encoding="utf-8", newline="\n") as f:
        f.write(f"# generated by scripts/gen_emoji_table.py from emoji {emoji.__version__}\n")
        for seq, name in rows:
            f.write(f"{seq}\t{name}\n")
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
