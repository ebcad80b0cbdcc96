"""Loading and writing document corpora.

Two input layouts: a directory of UTF-8 plain-text files (one document per
file, id = filename stem) or a JSON-lines file with {id, source, title, text}
records. A wiki directory may carry a ``manifest.json`` mapping entity name
to a relative file path.
"""

from __future__ import annotations

import json
from pathlib import Path

from .textproc import RawDocument


class CorpusError(ValueError):
    pass


def _doc_from_record(rec: dict, where: str, default_source: str) -> RawDocument:
    try:
        return RawDocument(
            id=rec["id"],
            source=rec.get("source", default_source),
            title=rec.get("title", ""),
            text=rec["text"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"{where}: bad document record ({exc})") from exc


def load_documents(path: str | Path, source: str = "other") -> list[RawDocument]:
    """Load a corpus from a directory of .txt files or a .jsonl file."""
    path = Path(path)
    docs: list[RawDocument] = []
    if path.is_dir():
        for fp in sorted(path.glob("*.txt")):
            text = fp.read_text(encoding="utf-8")
            if not text.strip():
                raise CorpusError(f"{fp}: empty document")
            docs.append(RawDocument(id=fp.stem, source=source, title="", text=text))
    elif path.is_file():
        for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{n}: invalid JSON ({exc})") from exc
            docs.append(_doc_from_record(rec, f"{path}:{n}", source))
    else:
        raise CorpusError(f"{path}: no such file or directory")

    seen: set[str] = set()
    for d in docs:
        if d.id in seen:
            raise CorpusError(f"duplicate document id {d.id!r}")
        seen.add(d.id)
    return docs


def write_documents_jsonl(docs: list[RawDocument], fp) -> None:
    for d in docs:
        rec = {"id": d.id, "source": d.source, "title": d.title, "text": d.text}
        fp.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def load_entity_manifest(directory: str | Path) -> dict[str, Path] | None:
    """Entity -> document file map, if the directory ships one."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        return None
    try:
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{manifest_path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise CorpusError(f"{manifest_path}: expected an object mapping entity to path")
    return {entity: directory / rel for entity, rel in raw.items()}


def load_manifest_documents(
    directory: str | Path,
    entities: list[str],
    source: str = "wiki",
) -> list[RawDocument]:
    """Documents for the given entities via the directory manifest.

    Entities without a manifest entry are skipped; with no manifest at all the
    whole directory is the pool.
    """
    manifest = load_entity_manifest(directory)
    if manifest is None:
        return load_documents(directory, source=source)
    docs: dict[str, RawDocument] = {}
    for entity in entities:
        fp = manifest.get(entity)
        if fp is None or not fp.exists():
            continue
        doc_id = fp.stem
        if doc_id not in docs:
            text = fp.read_text(encoding="utf-8")
            docs[doc_id] = RawDocument(id=doc_id, source=source, title=entity, text=text)
    return [docs[k] for k in sorted(docs)]
