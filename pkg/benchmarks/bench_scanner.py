#!/usr/bin/env python3
"""Benchmark: compiled scanner extension vs the pure-Python fallback.

Generates a synthetic Java corpus, then times raw tokenization with both
backends and full fact extraction on top of each.  Usage:

    python benchmarks/bench_scanner.py [--mb 8] [--repeats 3]
"""

import argparse
import random
import time

from migmine.javafacts import _Walker, _scanner_py

try:
    from migmine.javafacts import _scanner as _scanner_c
except ImportError:
    _scanner_c = None


CLASS_TEMPLATE = """package com.example.gen{idx};

import org.json.JSONObject;
import com.google.gson.Gson;
import java.util.List;

/**
 * Generated workload class {idx}: mixes declarations, literals and calls
 * the way migration-era client code does.
 */
public class Workload{idx} {{
    private static final String BANNER = "workload-{idx} // not a comment";
    private JSONObject cache;

    public String convert(Object value, List<String> names) {{
        JSONObject holder = new JSONObject(value); // hot path
        for (String name : names) {{
            holder.put(name, value.hashCode() + {idx});
        }}
        String legacy = holder.toJSONString();
        /* migration target below */
        Gson mapper = new Gson();
        String modern = mapper.toJson(value);
        return legacy.length() > modern.length() ? legacy : modern;
    }}

    public int survey(String payload) {{
        int total = 0;
        for (int i = 0; i < payload.length(); i++) {{
            char c = payload.charAt(i);
            total += c == '{{' ? 2 : 1;
        }}
        return total;
    }}
}}
"""


def synth_corpus(target_mb: float) -> list[str]:
    rng = random.Random(1234)
    files = []
    size = 0
    idx = 0
    target = target_mb * 1024 * 1024
    while size < target:
        body = CLASS_TEMPLATE.format(idx=idx)
        # pad with comment noise of varying size so files differ
        body += "// " + "x" * rng.randrange(10, 200) + "\n"
        files.append(body)
        size += len(body)
        idx += 1
    return files


def time_workload(label: str, work, files: list[str], repeats: int) -> float:
    total_chars = sum(len(f) for f in files)
    best = float("inf")
    produced = 0
    for _ in range(repeats):
        start = time.perf_counter()
        produced = sum(work(f) for f in files)
        best = min(best, time.perf_counter() - start)
    mbps = total_chars / best / 1e6
    print(f"  {label:<22} {best:8.3f} s   {mbps:8.1f} MB/s   ({produced} items)")
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mb", type=float, default=8.0, help="corpus size in MB")
    parser.add_argument("--repeats", type=int, default=3, help="best-of repeats")
    args = parser.parse_args()

    files = synth_corpus(args.mb)
    print(f"corpus: {len(files)} files, {sum(len(f) for f in files) / 1e6:.1f} MB\n")

    print("tokenize only:")
    py = time_workload("pure python", lambda s: len(_scanner_py.tokenize(s)), files, args.repeats)
    if _scanner_c is not None:
        c = time_workload(
            "compiled extension", lambda s: len(_scanner_c.tokenize(s)), files, args.repeats
        )
        print(f"  -> tokenize speedup: {py / c:.1f}x")
    else:
        print("  compiled extension not built (pip install -e . builds it)")

    def extract_py(source):
        return len(_Walker(_scanner_py.tokenize(source), "<bench>").run().invocations)

    print("\nfull fact extraction (scanner + walker):")
    py = time_workload("pure python", extract_py, files, args.repeats)
    if _scanner_c is not None:

        def extract_c(source):
            return len(_Walker(_scanner_c.tokenize(source), "<bench>").run().invocations)

        c = time_workload("compiled extension", extract_c, files, args.repeats)
        print(f"  -> end-to-end speedup: {py / c:.1f}x")


if __name__ == "__main__":
    main()
