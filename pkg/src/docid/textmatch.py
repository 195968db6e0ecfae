"""OCR-side classifier: tokenize extracted text, match keyword metadata.

The OCR engine itself is a pluggable TextProvider; a deterministic fixture
provider keyed by image content hash ships for offline tests, and a thin
remote adapter posts image bytes to an HTTP endpoint. Per-class confidence
is the plain ratio of matched keywords to total keywords.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import re
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from .errors import ProviderError, ProviderUnavailable, SchemaError
from .imaging import Image

TIER_UNIQUE = "unique"
TIER_TYPE_MUTUAL = "type_mutual"
TIER_SUBCLASS_MUTUAL = "subclass_mutual"
TIERS = (TIER_UNIQUE, TIER_TYPE_MUTUAL, TIER_SUBCLASS_MUTUAL)

_TOKEN_SPLIT = re.compile(r"[^0-9A-Za-z]+")


@dataclass(frozen=True)
class ExtractedText:
    """Normalized tokens plus the raw text retained for audit."""

    words: tuple
    provider_id: str = "direct"
    raw: str = ""

    @property
    def word_set(self) -> frozenset:
        return frozenset(self.words)


@dataclass(frozen=True)
class KeywordMetadata:
    """One class's keyword list with a tier tag per keyword."""

    class_id: int
    keywords: tuple
    tiers: tuple

    def __post_init__(self):
        kws = tuple(normalize_word(k) for k in self.keywords)
        if not kws:
            raise SchemaError(f"class {self.class_id}: needs >= 1 keyword")
        if len(set(kws)) != len(kws):
            raise SchemaError(f"class {self.class_id}: duplicate keywords")
        if len(self.tiers) != len(kws):
            raise SchemaError(f"class {self.class_id}: tier per keyword required")
        for t in self.tiers:
            if t not in TIERS:
                raise SchemaError(f"class {self.class_id}: unknown tier {t!r}")
        object.__setattr__(self, "keywords", kws)
        object.__setattr__(self, "tiers", tuple(self.tiers))

    @property
    def keyword_set(self) -> frozenset:
        return frozenset(self.keywords)


def normalize_word(word: str) -> str:
    w = "".join(_TOKEN_SPLIT.split(word)).upper()
    if not w:
        raise SchemaError(f"keyword {word!r} has no alphanumeric content")
    return w


def tokenize(raw: str, provider_id: str = "direct") -> ExtractedText:
    """Split on any non-alphanumeric run, uppercase, drop empties.

    Letters and digits with no separator between them stay a single word.
    """
    words = tuple(w.upper() for w in _TOKEN_SPLIT.split(raw) if w)
    return ExtractedText(words, provider_id, raw)


def match_class(text: ExtractedText, meta: KeywordMetadata) -> float:
    """|keywords present in the text| / |keywords| (exact token equality)."""
    present = text.word_set
    hit = sum(1 for k in meta.keywords if k in present)
    return hit / len(meta.keywords)


def classify_text(text: ExtractedText, metas) -> np.ndarray:
    """Per-class confidences in the given class order."""
    if not metas:
        raise ValueError("classify_text needs at least one class")
    return np.array([match_class(text, m) for m in metas], dtype=np.float64)


# -- providers -----------------------------------------------------------------


def content_hash(img: Image) -> str:
    """Stable identity of an image's decoded pixels (sha256 hex)."""
    h = hashlib.sha256()
    h.update(f"{img.width}x{img.height}:{img.channels}:".encode())
    h.update(img.data.tobytes())
    return h.hexdigest()


class TextProvider(Protocol):
    provider_id: str

    def extract(self, img: Image) -> str: ...


class FixtureTextProvider:
    """Deterministic provider: content hash -> canned raw text.

    The mapping comes from a JSON file ({hash: text}) written alongside a
    generated corpus; unknown images yield empty text.
    """

    provider_id = "fixture"

    def __init__(self, mapping: Optional[dict] = None, path=None):
        if path is not None:
            with open(path, "r", encoding="utf-8") as fh:
                mapping = json.load(fh)
        self.mapping = dict(mapping or {})

    def extract(self, img: Image) -> str:
        return self.mapping.get(content_hash(img), "")


class RemoteTextProvider:
    """HTTP adapter: POST image bytes, receive UTF-8 text back.

    Credentials come from the environment variable named in the config;
    one retry, 10 s timeout by default.
    """

    provider_id = "remote"

    def __init__(self, url: str, timeout: float = 10.0, retries: int = 1,
                 credentials_env: str = "DOCID_OCR_TOKEN"):
        self.url = url
        self.timeout = timeout
        self.retries = retries
        self.credentials_env = credentials_env

    def extract(self, img: Image) -> str:
        import requests
        from PIL import Image as PilImage

        buf = io.BytesIO()
        mode = "L" if img.channels == "gray" else "RGB"
        PilImage.fromarray(np.asarray(img.data), mode=mode).save(buf, format="PNG")
        headers = {"Content-Type": "image/png"}
        token = os.environ.get(self.credentials_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        last_exc = None
        for _ in range(self.retries + 1):
            try:
                resp = requests.post(self.url, data=buf.getvalue(),
                                     headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if resp.status_code != 200:
                raise ProviderError(f"provider returned HTTP {resp.status_code}")
            return resp.text
        raise ProviderUnavailable(f"cannot reach text provider at {self.url}") \
            from last_exc


def extract_text(img: Image, provider) -> ExtractedText:
    """Run the provider and tokenize its raw output."""
    raw = provider.extract(img)
    return tokenize(raw, provider_id=provider.provider_id)


# -- metadata files --------------------------------------------------------------


def load_metadata(path) -> list:
    """Keyword metadata from JSON ([{class_id, keywords:[{word,tier}]}]) or CSV.

    The CSV layout mirrors a one-row-per-keyword table: class_id, word, tier.
    """
    text = open(path, "r", encoding="utf-8").read()
    metas = []
    if str(path).endswith(".json"):
        for entry in json.loads(text):
            try:
                words = [k["word"] for k in entry["keywords"]]
                tiers = [k.get("tier", TIER_UNIQUE) for k in entry["keywords"]]
                metas.append(KeywordMetadata(int(entry["class_id"]),
                                             tuple(words), tuple(tiers)))
            except KeyError as exc:
                raise SchemaError(f"metadata entry missing field {exc}") from exc
    else:
        by_class: dict = {}
        for rec in csv.DictReader(text.splitlines()):
            try:
                cid = int(rec["class_id"])
                by_class.setdefault(cid, []).append(
                    (rec["word"], rec.get("tier") or TIER_UNIQUE))
            except (KeyError, TypeError) as exc:
                raise SchemaError(f"bad metadata row {rec!r}") from exc
        for cid in sorted(by_class):
            words, tiers = zip(*by_class[cid])
            metas.append(KeywordMetadata(cid, words, tiers))
    if not metas:
        raise SchemaError(f"no metadata rows in {path}")
    return metas
