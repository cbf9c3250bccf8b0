"""Bundled design catalog.

Three suites ship with the package:

* ``A1``..``A4``: four regular 16x5 designs spanning resolutions III to V;
* ``B1``..``B12``: twelve nonregular 14x5 designs, ordered from least to most
  aliased;
* ``N6``, ``N10``, ``N17``, ``N18``, ``N21``, ``N22``, ``N25``: saturated
  designs (m = N - 1) found by the columnwise-pairwise search, also known by
  their ``D_N`` aliases in the published benchmark table.

Files are verbatim transcriptions of the published matrices; checksums pin
them against accidental edits.
"""

import hashlib
from importlib import resources

from .design import Design, parse_design

CHECKSUMS = {
    "A1": "8a1aaecae0248224651547f18f125c2ca7339c7bade1367e243699da90658dfc",
    "A2": "a1f52ca731bb9afbb6ed1e274b11b8224e8729079b69a0c139e2f3458762d173",
    "A3": "967418f0cae49a870ec643afc5a390ef8ebecf8f6e2f512f3088817e1aeb8e1b",
    "A4": "fb797bec2ec6198148c37faddb66f62dcb0a5016d4ccdf686945f802cd515059",
    "B1": "ea5ba303ac02a8dfd37c8c765fa10afb638a121957565f4120d55a05baba48f0",
    "B2": "594f7937af659056985d6111d43c764b3ec71c03bdeef27eb2fcadcc8146b068",
    "B3": "722e949a62c70752fa96d4481f9320e1c81bcd30f5ac337891eeebd88406289f",
    "B4": "53980cb410fce47ec461843a38b6bbf0645a35b0ddb44868fcdf400fc9cf2da8",
    "B5": "711682382dfb57f6a7fe07bdb39acb70d995b43b56397b0be41b94ba63c7b0d3",
    "B6": "286fcde2d9c0b01bf893a484767af1ef489196f4713746887b27086f4be3334f",
    "B7": "9c8d05f559ebefaa1919494594c0cd228a5361bd90db95d8504d1d70832a0285",
    "B8": "3e9a39aa563e93798dd1e74e0c8d8ddc2b218c6c70e2b37456cb9afc860f560f",
    "B9": "83f7f4ca5a7da1ee48ec51251f90d95e2375fa896cdbd288588dce0eed9fb477",
    "B10": "ae1f8bad5cbc3365746e7b969eaf0c72587b9455f6c2eb0c060c4b7dfb601f65",
    "B11": "7f4d2f9fd4a66d4760f5e5f5c5718c99cadf12d39db9ff3f12116f56a0f56518",
    "B12": "b987c941f0a568a3c1e26071519d829b68c3eb7614ad7fb0f46781259eeb2f3d",
    "N6": "de7801bfb3fca22306b3412a0d7c4223418e8c93925837fc0a5c243c1d6cff56",
    "N10": "378e0df15abbe08fec12dbf5a65fbdeb74352d7e0d04e3eea53c5b0416114885",
    "N17": "5fc3af05e46a3c11ab93152c83b5963245f076cd2625a8b0b5c158eb7c09b7d3",
    "N18": "2680b3ddc1292dc9b19d8dbb9c88e06f2e592ac828b2d937fd300f3543509cd4",
    "N21": "78b29cbf18ff7e529148b55365efc57f49a8903a963ce66e823e294dce797668",
    "N22": "4e1c77c2e3993b632b4265b4cc4ce378e03c409a07e6fa36781c6674ec2c29e4",
    "N25": "2323816ac79d9a3af1a29e4230e8ac4ebcdce2cf6f3c0ab7fe6de142811c5410",
}

REGULAR_SUITE = ("A1", "A2", "A3", "A4")
NONREGULAR_SUITE = tuple(f"B{i}" for i in range(1, 13))
SATURATED_SUITE = ("N6", "N10", "N17", "N18", "N21", "N22", "N25")


def catalog_labels() -> tuple:
    return REGULAR_SUITE + NONREGULAR_SUITE + SATURATED_SUITE


def normalize_label(label: str) -> str:
    """Map user spellings (a_1, d6, B_10, ...) onto catalog labels."""
    key = label.strip().upper().replace("_", "")
    if key.startswith("D") and key[1:].isdigit():
        key = "N" + key[1:]
    if key not in CHECKSUMS:
        raise KeyError(f"unknown catalog design {label!r}")
    return key


def fixture_text(label: str) -> str:
    key = normalize_label(label)
    return (resources.files("robustdoe") / "fixtures" / f"{key}.txt").read_text(encoding="utf-8")


def load_fixture(label: str) -> Design:
    key = normalize_label(label)
    return parse_design(fixture_text(key), label=key)


def verify_checksums() -> dict:
    """Recompute every fixture digest; returns {label: matches_record}."""
    out = {}
    for label, expected in CHECKSUMS.items():
        digest = hashlib.sha256(fixture_text(label).encode("utf-8")).hexdigest()
        out[label] = digest == expected
    return out
