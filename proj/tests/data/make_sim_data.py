"""Writes the small embedding file and idea corpus used by service, sim and
acceptance tests. Deterministic; rerun to regenerate.

    python3 tests/data/make_sim_data.py tests/data
"""
import random
import sys
from pathlib import Path

WORDS = """
the a of and to in was her his their she he they it that with for on at by from
harbor rain pier siren doctor detective town night storm lighthouse ship captain
letter secret island village forest river mountain castle tower garden station
train window door key map clock mirror lantern bridge road market tavern library
song voice shadow light fire water stone glass blood gold silver iron salt smoke
found lost hid opened closed carried followed remembered forgot promised stole
whispered sang ran waited watched heard burned broke returned escaped discovered
old young quiet cold dark bright strange silent broken hidden ancient missing
sister brother mother father stranger friend enemy child widow sailor thief
because before after while until when where nobody somebody everyone always never
""".split()


def main(out: Path) -> None:
    rng = random.Random(20240611)
    dim = 16
    with open(out / "embeddings_small.txt", "w") as f:
        for w in WORDS:
            vec = [rng.gauss(0.0, 1.0) for _ in range(dim)]
            f.write(w + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")

    content = [w for w in WORDS[24:]]
    glue = WORDS[:24]
    lines = []
    for _ in range(80):
        sentences = []
        n = 0
        target = rng.randint(55, 80)
        while n < target:
            k = rng.randint(7, 13)
            s = [rng.choice(content if i % 2 == 0 else glue + content) for i in range(k)]
            s[0] = s[0].capitalize()
            sentences.append(" ".join(s) + ".")
            n += k
        lines.append(" ".join(sentences))
    (out / "ideas_corpus.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "."))
