"""MULAN-style multi-label datasets: ARFF data plus an XML label header."""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    """Malformed or inconsistent dataset input."""


class SchemaError(DatasetError):
    pass


@dataclass(frozen=True)
class AttributeMeta:
    name: str
    kind: str  # "numeric" or "nominal"
    categories: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    label_names: tuple[str, ...]
    attribute_meta: tuple[AttributeMeta, ...]

    def __post_init__(self):
        if self.features.ndim != 2 or self.labels.ndim != 2:
            raise DatasetError("features and labels must be 2-D")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DatasetError("features and labels disagree on the number of rows")
        if self.labels.shape[1] != len(self.label_names):
            raise DatasetError("label_names length differs from label column count")
        if self.features.shape[1] != len(self.attribute_meta):
            raise DatasetError("attribute_meta length differs from feature column count")
        if not np.isin(self.labels, (0, 1)).all():
            raise DatasetError("label value outside {0,1}")
        for arr in (self.features, self.labels):
            arr.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.label_names == other.label_names
            and self.attribute_meta == other.attribute_meta
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None

    @property
    def n_instances(self) -> int:
        return self.labels.shape[0]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]


@dataclass(frozen=True)
class DatasetPair:
    train: Dataset
    test: Dataset

    def __post_init__(self):
        diff = schema_diff(self.train, self.test)
        if diff:
            raise SchemaError("train/test schema mismatch:\n" + "\n".join(diff))


def parse_label_header(xml_text: str) -> list[str]:
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise DatasetError(f"malformed label XML at line {line}, column {col}: {exc}") from None
    if _local(root.tag) != "labels":
        raise SchemaError(f"label header root must be <labels>, got <{_local(root.tag)}>")
    names = []
    for el in root.iter():
        if el is root or _local(el.tag) != "label":
            continue
        name = el.get("name")
        if name is None:
            raise SchemaError("<label> element without a name attribute")
        names.append(name)
    if not names:
        raise SchemaError("label header declares zero labels")
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        raise SchemaError(f"duplicate label names in header: {dup}")
    return names


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


_ATTR_RE = re.compile(r"@attribute\s+('(?:[^'\\]|\\.)*'|\"(?:[^\"\\]|\\.)*\"|\S+)\s+(.*)$", re.I)


def _unquote(tok: str) -> str:
    tok = tok.strip()
    if len(tok) >= 2 and tok[0] == tok[-1] and tok[0] in "'\"":
        return re.sub(r"\\(.)", r"\1", tok[1:-1])
    return tok


def _split_values(text: str) -> list[str]:
    """Split on commas outside quotes."""
    out, buf, quote = [], [], None
    i = 0
    while i < len(text):
        ch = text[i]
        if quote:
            buf.append(ch)
            if ch == "\\" and i + 1 < len(text):
                buf.append(text[i + 1])
                i += 1
            elif ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == ",":
            out.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
        i += 1
    out.append("".join(buf).strip())
    return out


def _parse_header(lines):
    attrs: list[AttributeMeta] = []
    for lineno, line in lines:
        low = line.lower()
        if low.startswith("@relation"):
            continue
        if low.startswith("@data"):
            return attrs
        if not low.startswith("@attribute"):
            raise DatasetError(f"line {lineno}: unexpected header line {line!r}")
        m = _ATTR_RE.match(line)
        if not m:
            raise DatasetError(f"line {lineno}: malformed @attribute declaration")
        name, spec = _unquote(m.group(1)), m.group(2).strip()
        if spec.startswith("{"):
            if not spec.endswith("}"):
                raise DatasetError(f"line {lineno}: unterminated nominal category list")
            cats = tuple(_unquote(c) for c in _split_values(spec[1:-1]))
            attrs.append(AttributeMeta(name, "nominal", cats))
        elif spec.lower() in ("numeric", "real", "integer"):
            attrs.append(AttributeMeta(name, "numeric"))
        else:
            raise DatasetError(f"line {lineno}: unsupported attribute type {spec!r} for {name!r}")
    raise DatasetError("ARFF text has no @data section")


def parse_arff(arff_text: str, label_names) -> Dataset:
    """Parse dense or sparse ARFF rows; label columns are located by name."""
    lines = [
        (i, ln.strip())
        for i, ln in enumerate(arff_text.splitlines(), 1)
        if ln.strip() and not ln.strip().startswith("%")
    ]
    it = iter(lines)
    attrs = _parse_header(it)
    index = {a.name: i for i, a in enumerate(attrs)}
    missing = [n for n in label_names if n not in index]
    if missing:
        raise SchemaError(f"labels absent from ARFF attributes: {missing}")
    label_cols = [index[n] for n in label_names]
    label_set = set(label_cols)
    feature_cols = [i for i in range(len(attrs)) if i not in label_set]
    cat_code = [
        {c: k for k, c in enumerate(a.categories)} if a.kind == "nominal" else None for a in attrs
    ]

    def convert(col, tok, lineno):
        tok = _unquote(tok)
        if tok == "?":
            raise DatasetError(f"line {lineno}: missing value '?' in {attrs[col].name!r}")
        if col in label_set:
            if tok not in ("0", "1"):
                raise DatasetError(f"line {lineno}: label value outside {{0,1}}: {tok!r}")
            return float(tok)
        codes = cat_code[col]
        if codes is not None:
            if tok not in codes:
                raise DatasetError(f"line {lineno}: unknown category {tok!r} for {attrs[col].name!r}")
            return float(codes[tok])
        try:
            return float(tok)
        except ValueError:
            raise DatasetError(
                f"line {lineno}: non-numeric value {tok!r} in numeric column {attrs[col].name!r}"
            ) from None

    rows = []
    for lineno, line in it:
        row = np.zeros(len(attrs))
        if line.startswith("{"):
            if not line.endswith("}"):
                raise DatasetError(f"line {lineno}: unterminated sparse row")
            body = line[1:-1].strip()
            for item in _split_values(body) if body else []:
                parts = item.split(None, 1)
                if len(parts) != 2 or not parts[0].isdigit():
                    raise DatasetError(f"line {lineno}: malformed sparse entry {item!r}")
                col = int(parts[0])
                if col >= len(attrs):
                    raise DatasetError(f"line {lineno}: unknown attribute index {col}")
                row[col] = convert(col, parts[1], lineno)
        else:
            vals = _split_values(line)
            if len(vals) != len(attrs):
                raise DatasetError(
                    f"line {lineno}: row has {len(vals)} values, expected {len(attrs)}"
                )
            for col, tok in enumerate(vals):
                row[col] = convert(col, tok, lineno)
        rows.append(row)

    data = np.array(rows).reshape(len(rows), len(attrs))
    return Dataset(
        features=data[:, feature_cols].copy(),
        labels=data[:, label_cols].astype(np.int8),
        label_names=tuple(label_names),
        attribute_meta=tuple(attrs[i] for i in feature_cols),
    )


def _quote(name: str) -> str:
    if re.fullmatch(r"[A-Za-z0-9_.\-]+", name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _fmt_num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def to_arff(dataset: Dataset, relation: str = "dataset") -> str:
    """Dense ARFF: features first, then one {0,1} attribute per label."""
    out = [f"@relation {_quote(relation)}", ""]
    for a in dataset.attribute_meta:
        if a.kind == "nominal":
            out.append(f"@attribute {_quote(a.name)} {{{','.join(_quote(c) for c in a.categories)}}}")
        else:
            out.append(f"@attribute {_quote(a.name)} numeric")
    for name in dataset.label_names:
        out.append(f"@attribute {_quote(name)} {{0,1}}")
    out += ["", "@data"]
    for x, y in zip(dataset.features, dataset.labels):
        vals = [
            _quote(a.categories[int(v)]) if a.kind == "nominal" else _fmt_num(v)
            for a, v in zip(dataset.attribute_meta, x)
        ]
        vals += [str(int(v)) for v in y]
        out.append(",".join(vals))
    return "\n".join(out) + "\n"


def to_label_header(label_names) -> str:
    body = "".join(f'  <label name="{_xml_escape(n)}"/>\n' for n in label_names)
    return (
        '<?xml version="1.0" encoding="utf-8"?>\n'
        '<labels xmlns="http://mulan.sourceforge.net/labels">\n' + body + "</labels>\n"
    )


def _xml_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;")


def schema_diff(a: Dataset, b: Dataset) -> list[str]:
    diff = []
    if a.label_names != b.label_names:
        diff.append(f"label names differ: {list(a.label_names)} vs {list(b.label_names)}")
    names_a = [m.name for m in a.attribute_meta]
    names_b = [m.name for m in b.attribute_meta]
    for n in names_a:
        if n not in names_b:
            diff.append(f"attribute {n!r} missing from second file")
    for n in names_b:
        if n not in names_a:
            diff.append(f"attribute {n!r} missing from first file")
    if not diff:
        for ma, mb in zip(a.attribute_meta, b.attribute_meta):
            if ma != mb:
                diff.append(f"attribute declarations differ: {ma} vs {mb}")
    return diff


def load_pair(train_path, test_path, xml_path) -> DatasetPair:
    names = parse_label_header(Path(xml_path).read_text())
    train = parse_arff(Path(train_path).read_text(), names)
    test = parse_arff(Path(test_path).read_text(), names)
    return DatasetPair(train, test)


def write_pair(pair: DatasetPair, directory, name: str) -> tuple[Path, Path, Path]:
    """Write ``<name>-train.arff``, ``<name>-test.arff`` and ``<name>.xml``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = (d / f"{name}-train.arff", d / f"{name}-test.arff", d / f"{name}.xml")
    paths[0].write_text(to_arff(pair.train, name))
    paths[1].write_text(to_arff(pair.test, name))
    paths[2].write_text(to_label_header(pair.train.label_names))
    return paths
