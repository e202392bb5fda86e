#!/usr/bin/env python3
# Copyright 2026 The sidescore Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Merges the UCI student-mat.csv and student-por.csv files into one table.

Students are matched on the attributes shared by both course files. Nominal
attributes become integer codes and yes/no attributes become 0/1. The output
keeps the shared attributes as features, adds the per-course attributes from
the Portuguese file, and writes G3_por (side information) and G3_mat (the
held-out target). The intermediate grades G1 and G2 are dropped.
"""

import argparse

import pandas as pd

MERGE_KEYS = [
    "school", "sex", "age", "address", "famsize", "Pstatus", "Medu", "Fedu",
    "Mjob", "Fjob", "reason", "nursery", "internet",
]


def encode(frame: pd.DataFrame) -> pd.DataFrame:
    out = frame.copy()
    for col in out.columns:
        if out[col].dtype == object:
            values = sorted(out[col].unique())
            if values == ["no", "yes"]:
                out[col] = (out[col] == "yes").astype(int)
            else:
                out[col] = out[col].map({v: i for i, v in enumerate(values)})
    return out


def prepare(mat_path: str, por_path: str) -> pd.DataFrame:
    mat = pd.read_csv(mat_path, sep=";")
    por = pd.read_csv(por_path, sep=";")
    merged = mat.merge(por, on=MERGE_KEYS, suffixes=("_mat", "_por"))
    drop = [c for c in merged.columns if c.startswith(("G1", "G2", "G3")) or c.endswith("_mat")]
    features = merged.drop(columns=drop)
    features = features.rename(columns={c: c[: -len("_por")] for c in features.columns if c.endswith("_por")})
    out = encode(features)
    out["G3_por"] = merged["G3_por"].values
    out["G3_mat"] = merged["G3_mat"].values
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mat", required=True, help="path to student-mat.csv")
    parser.add_argument("--por", required=True, help="path to student-por.csv")
    parser.add_argument("--out", required=True, help="merged CSV to write")
    args = parser.parse_args()
    out = prepare(args.mat, args.por)
    out.to_csv(args.out, index=False)
    print(f"wrote {len(out)} students to {args.out}")


if __name__ == "__main__":
    main()
