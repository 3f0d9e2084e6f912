#!/usr/bin/env python3
"""Build the small real-text dataset bundle shipped in data/.

Documents are the leading paragraphs of API docstrings from four library
domains (statistics, graph algorithms, image processing, internet
protocols). Vectors are mean-pooled pretrained token embeddings from the
`wordllama` package (no normalization). Output is the JSON Lines dataset format
read by `semsteer`.

    pip install wordllama
    python3 scripts/make_text_bundle.py --out data/docstrings4.jsonl
"""

import argparse
import importlib
import inspect
import json
import pkgutil
import random
import re

import numpy as np

DOMAINS = {
    "statistics": ["scipy.stats", "statistics", "statsmodels.stats"],
    "graphs": ["networkx.algorithms", "networkx.generators", "networkx.classes"],
    "imaging": ["skimage.filters", "skimage.morphology", "skimage.feature", "skimage.transform",
                "skimage.segmentation", "skimage.exposure", "skimage.measure", "skimage.restoration",
                "skimage.color", "skimage.draw"],
    "networking": ["email", "http", "urllib", "smtplib", "imaplib", "poplib", "ftplib", "socket",
                   "ssl", "socketserver", "mailbox", "ipaddress", "asyncio.streams", "xmlrpc",
                   "wsgiref", "http.cookiejar", "requests", "httpx"],
}


def iter_modules(root):
    try:
        module = importlib.import_module(root)
    except Exception:
        return
    yield module
    for info in pkgutil.walk_packages(getattr(module, "__path__", []), root + "."):
        if ".tests" in info.name or "._" in info.name or "test" in info.name.split(".")[-1]:
            continue
        try:
            yield importlib.import_module(info.name)
        except Exception:
            continue


def members(module, package):
    """Public classes, their methods, and functions defined under `package`."""
    for name, obj in sorted(vars(module).items()):
        if name.startswith("_"):
            continue
        if not str(getattr(obj, "__module__", "")).startswith(package):
            continue
        if inspect.isclass(obj):
            yield f"{module.__name__}.{name}", obj
            for meth_name, meth in sorted(vars(obj).items()):
                if not meth_name.startswith("_") and inspect.isfunction(meth):
                    yield f"{module.__name__}.{name}.{meth_name}", meth
        elif inspect.isfunction(obj):
            yield f"{module.__name__}.{name}", obj


def summary(doc, limit):
    """Leading prose paragraphs, stopping at the first section heading."""
    lines = inspect.cleandoc(doc).splitlines()
    kept = []
    for i, line in enumerate(lines):
        if i + 1 < len(lines) and re.fullmatch(r"\s*-{3,}\s*", lines[i + 1]):
            break
        if line.strip().startswith((">>>", ":param", "Args:", "Parameters", "Returns")):
            break
        kept.append(line.strip())
    text = re.sub(r"\s+", " ", " ".join(kept)).strip()
    return text[:limit].rsplit(" ", 1)[0] if len(text) > limit else text


def collect(roots, min_chars, limit):
    seen, objects, docs = set(), set(), []
    for root in roots:
        package = root.split(".")[0]
        for module in iter_modules(root):
            for qualname, obj in members(module, package):
                if id(obj) in objects:
                    continue
                objects.add(id(obj))
                doc = inspect.getdoc(obj)
                if not doc:
                    continue
                text = summary(doc, limit)
                if len(text) < min_chars or text in seen:
                    continue
                seen.add(text)
                docs.append((qualname, text))
    return sorted(docs)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True)
    parser.add_argument("--per-class", type=int, default=120)
    parser.add_argument("--min-chars", type=int, default=120)
    parser.add_argument("--max-chars", type=int, default=600)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--dim", type=int, default=256, help="Matryoshka truncation width")
    args = parser.parse_args()

    from wordllama import WordLlama

    model = WordLlama.load(trunc_dim=args.dim, disable_download=True)
    rng = random.Random(args.seed)
    records = []
    for label, roots in DOMAINS.items():
        docs = collect(roots, args.min_chars, args.max_chars)
        if len(docs) < args.per_class:
            raise SystemExit(f"{label}: only {len(docs)} docstrings")
        picked = rng.sample(docs, args.per_class)
        vectors = np.asarray(model.embed([text for _, text in picked], norm=False), dtype=np.float64)
        for (qualname, text), vector in zip(picked, vectors):
            records.append({"id": qualname, "label": label, "text": text,
                            "vector": [round(float(v), 7) for v in vector]})
        print(f"{label}: {len(docs)} candidates, kept {args.per_class}")

    rng.shuffle(records)
    with open(args.out, "w") as out:
        for record in records:
            out.write(json.dumps(record) + "\n")
    print(f"wrote {len(records)} documents to {args.out}")


if __name__ == "__main__":
    main()
