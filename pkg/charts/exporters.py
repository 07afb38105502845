from __future__ import annotations
import json


def df_to_csv_bytes(df, *, index: bool = False) -> bytes:
    return df.to_csv(index=index, lineterminator="\n").encode("utf-8")


def to_json_bytes(doc) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")
