#!/usr/bin/env python3
"""Convert the Fodor's/Zagat restaurant tables into crowder's CSV layout.

Input: a directory holding fodors.csv, zagats.csv and matches_fodors_zagats.csv
(as shipped with py_entitymatching under datasets/end-to-end/restaurants).
Output: restaurant.csv (id,name,addr,city,type) and restaurant_truth.csv
(id_a,id_b). Records that are identical on every kept attribute to an earlier
record are dropped, together with their match pairs.
"""
import argparse
import csv
import os

ATTRS = ["name", "addr", "city", "type"]


def read(path, prefix):
    with open(path, encoding="latin-1", newline="") as f:
        return [(prefix + row["id"], [row[a] for a in ATTRS]) for row in csv.DictReader(f)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("src")
    ap.add_argument("out")
    args = ap.parse_args()

    records = read(os.path.join(args.src, "fodors.csv"), "f") + read(os.path.join(args.src, "zagats.csv"), "z")
    seen, kept, dropped = set(), [], set()
    for rid, vals in records:
        key = tuple(vals)
        if key in seen:
            dropped.add(rid)
            continue
        seen.add(key)
        kept.append((rid, vals))

    matches = []
    with open(os.path.join(args.src, "matches_fodors_zagats.csv"), newline="") as f:
        for row in csv.DictReader(f):
            a, b = sorted(("f" + row["fodors_id"], "z" + row["zagats_id"]))
            if a not in dropped and b not in dropped:
                matches.append((a, b))

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "restaurant.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id"] + ATTRS)
        for rid, vals in kept:
            w.writerow([rid] + vals)
    with open(os.path.join(args.out, "restaurant_truth.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id_a", "id_b"])
        w.writerows(sorted(matches))
    print(f"{len(kept)} records, {len(matches)} matching pairs, {len(dropped)} identical records dropped")


if __name__ == "__main__":
    main()
