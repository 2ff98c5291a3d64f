#!/usr/bin/env python3
"""Writes the 104-document survey corpus used by the tests.

Composition: 61 non-computational, 18 implicit, 13 explicit (not literate)
and 12 literate documents. Computational share 43/104; of those 18 implicit,
25 explicit, 12 literate. Re-running produces identical files.

usage: gen_corpus.py OUTDIR
"""

import random
import sys
from pathlib import Path

WORDS = (
    "revenue cost margin forecast quarter budget rate inflation loan payment "
    "interest principal tax deduction income expense growth sample mean "
    "variance estimate model assumption scenario baseline target volume price "
    "unit inventory supplier customer region season trend balance cash flow"
).split()

TOPICS = ["sales", "loan", "budget", "grades", "inventory", "survey", "energy", "payroll",
          "travel", "garden", "fleet", "clinic", "library", "tuition", "harvest"]


def words(rng, n):
    return " ".join(rng.choice(WORDS) for _ in range(n)).capitalize() + "."


def paragraph_lines(rng, n):
    """n words split across one or two lines (line breaks do not change counts)."""
    text = words(rng, n)
    parts = text.split(" ")
    if n > 8 and rng.random() < 0.5:
        cut = n // 2
        return [" ".join(parts[:cut]), " ".join(parts[cut:])]
    return [text]


def grid_block(name, rows, formulas=True):
    out = [f"::: grid name={name}"]
    out.append("Item,Qty,Price,Total" if formulas else "Item,Qty,Price")
    for r in range(2, rows + 2):
        row = [f"item{r - 1}", str(r * 3 % 11 + 1), f"{(r * 7 % 13) + 0.5}"]
        if formulas:
            row.append(f"=B{r}*C{r}")
        out.append(",".join(row))
    out.append(":::")
    return out


def write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def non_computational(rng, i, out):
    topic = TOPICS[i % len(TOPICS)]
    style = i % 5
    name = f"plain_{i:02d}"
    if style == 0:
        # Plain CSV data, including wordy cells; no formulas so still NA.
        lines = ["Region,Units,Note"]
        for r in range(rng.randint(2, 6)):
            note = words(rng, rng.randint(1, 8)).rstrip(".")
            lines.append(f"r{r},{rng.randint(1, 99)},\"{note}\"")
        (out / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        return
    lines = [f"@title: {topic} notes {i}"]
    if style in (1, 2):
        lines += ["", f"# {topic.capitalize()}", ""]
        lines += paragraph_lines(rng, rng.randint(5, 60))
    if style in (2, 3):
        lines += [""] + grid_block(f"{topic}_data", rng.randint(1, 4), formulas=False)
    if style == 4:
        lines += ["", f"# {topic.capitalize()} log", "", f"## Entries", ""]
        lines += paragraph_lines(rng, rng.randint(20, 40))
        lines += ["", "::: asset src=img/chart.png caption=\"Monthly chart\"", ":::"]
    if style == 3 and rng.random() < 0.5:
        lines += ["", "::: assert msg=\"constant check\"", "1 < 2", ":::"]
    write(out / f"{name}.lsheet", lines)


def implicit(rng, i, out):
    topic = TOPICS[i % len(TOPICS)]
    name = f"implicit_{i:02d}"
    if i % 6 == 0:
        # Imported CSV with formulas and short labels only.
        lines = ["Item,Qty,Price,Total"]
        for r in range(2, rng.randint(3, 6) + 2):
            lines.append(f"item{r},{r},{r + 0.25},=B{r}*C{r}")
        lines.append(f"Sum,,,=SUM(D2:D{r})")
        (out / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        return
    lines = [f"@title: {topic} sheet {i}", "", f"# {topic.capitalize()} sheet", ""]
    lines += grid_block(f"{topic}_data", rng.randint(2, 5))
    if i % 3 == 1:
        # Just under the narrative threshold.
        lines += [""] + paragraph_lines(rng, 19)
    elif i % 3 == 2:
        # A long stub does not count as narrative.
        lines += ["", "::: narrative stub=true", "TODO: " + words(rng, 40), ":::"]
    lines += ["", f"::: formula name={topic}_total", f"{topic}_total = SUM({topic}_data!D2:D4)", ":::"]
    write(out / f"{name}.lsheet", lines)


def explicit(rng, i, out):
    topic = TOPICS[i % len(TOPICS)]
    name = f"explicit_{i:02d}"
    if i % 7 == 0:
        # Imported CSV annotated through long text cells.
        lines = ["Item,Qty,Price,Total"]
        for r in range(2, 5):
            lines.append(f"item{r},{r},{r + 0.5},=B{r}*C{r}")
        lines.append(f"\"{words(rng, 12).rstrip('.')}\",,,")
        lines.append(f"\"{words(rng, 10).rstrip('.')}\",,,")
        (out / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        return
    lines = [f"@title: {topic} workbook {i}"]
    variant = i % 3
    if variant == 0:
        # Wordy, but only one heading.
        lines += ["", f"# {topic.capitalize()}", ""]
        lines += paragraph_lines(rng, 30)
        lines += [""] + grid_block(f"{topic}_data", 3)
        lines += ["", f"::: formula name={topic}_total", f"{topic}_total = SUM({topic}_data!D2:D4)", ":::"]
    elif variant == 1:
        # Enough headings, poor coverage: narrative sits away from the computables.
        lines += ["", f"# {topic.capitalize()}", ""]
        lines += paragraph_lines(rng, 35)
        lines += ["", "## Numbers", ""]
        lines += grid_block(f"{topic}_data", 3)
        lines += ["", f"::: formula name={topic}_total", f"{topic}_total = SUM({topic}_data!D2:D4)", ":::"]
        lines += ["", f"::: formula name={topic}_mean", f"{topic}_mean = AVERAGE({topic}_data!D2:D4)", ":::"]
    else:
        # Narrative only at the end, no headings.
        lines += [""] + grid_block(f"{topic}_data", 2)
        lines += [""] + paragraph_lines(rng, 22)
    write(out / f"{name}.lsheet", lines)


def literate(rng, i, out):
    topic = TOPICS[i % len(TOPICS)]
    name = f"literate_{i:02d}"
    lines = [f"@title: {topic} model {i}", "", f"# {topic.capitalize()} model", ""]
    lines += paragraph_lines(rng, rng.randint(15, 30))
    lines += ["", "## Data", ""]
    lines += paragraph_lines(rng, rng.randint(8, 15))
    lines += [""] + grid_block(f"{topic}_data", 3)
    lines += ["", "## Results", ""]
    if i % 2:
        lines += [f"::: formula name={topic}_total desc=\"sum of line totals\"",
                  f"{topic}_total = SUM({topic}_data!D2:D4)", ":::"]
    else:
        lines += paragraph_lines(rng, 6)
        lines += ["", f"::: formula name={topic}_total", f"{topic}_total = SUM({topic}_data!D2:D4)", ":::"]
    lines += ["", f"The total is {{{{{topic}_total}}}} for [[{topic}_data]].", "",
              f"::: assert msg=\"{topic} total is positive\"", f"{topic}_total > 0", ":::"]
    write(out / f"{name}.lsheet", lines)


def main():
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    for old in list(out.glob("*.lsheet")) + list(out.glob("*.csv")):
        old.unlink()
    rng = random.Random(104)
    for i in range(61):
        non_computational(rng, i, out)
    for i in range(18):
        implicit(rng, i, out)
    for i in range(13):
        explicit(rng, i, out)
    for i in range(12):
        literate(rng, i, out)


if __name__ == "__main__":
    main()
