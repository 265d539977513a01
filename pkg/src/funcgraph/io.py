"""File formats: dataset CSV, chain archives, and graph exports.

The chain archive is a little-endian binary: magic, format version, a
JSON metadata header, float64 payloads, and a trailing SHA-256 checksum.
"""

import csv
import hashlib
import json
import struct

import numpy as np

from .errors import ArchiveChecksumError, ArchiveError, ArchiveVersionError, SchemaError
from .fpca import FunctionalDataset
from .posterior import Chain, EdgeGraph

DATASET_HEADER = ["subject_id", "node_id", "time", "value"]
ARCHIVE_MAGIC = b"FGCH"
ARCHIVE_VERSION = 1


# ---------------------------------------------------------------------------
# dataset CSV
# ---------------------------------------------------------------------------

def write_dataset_csv(dataset, path):
    """Write a FunctionalDataset in the row schema subject_id,node_id,time,value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_HEADER)
        for i in range(dataset.n_subjects):
            for j in range(dataset.n_nodes):
                times = np.asarray(dataset.times[i][j], dtype=float)
                values = np.asarray(dataset.values[i][j], dtype=float)
                for t, v in zip(times, values):
                    writer.writerow([i + 1, j + 1, repr(float(t)), repr(float(v))])


def _ordered_ids(ids):
    """Sort ids numerically when they all parse as integers, else lexically."""
    try:
        return sorted(ids, key=int)
    except ValueError:
        return sorted(ids)


def ingest_csv(path, rescale_time=False):
    """Parse a dataset CSV into a ragged FunctionalDataset.

    Times must lie in [0, 1] unless ``rescale_time`` is set, in which case
    they are min-max mapped onto [0, 1]. Duplicate (subject, node, time)
    rows and malformed rows are rejected with their line numbers.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != DATASET_HEADER:
            raise SchemaError(f"{path}: expected header {','.join(DATASET_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise SchemaError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            subject, node = row[0].strip(), row[1].strip()
            try:
                t, v = float(row[2]), float(row[3])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: non-numeric time or value") from exc
            rows.append((lineno, subject, node, t, v))
    if not rows:
        raise SchemaError(f"{path}: no data rows")

    if rescale_time:
        t_all = np.array([r[3] for r in rows])
        lo, hi = t_all.min(), t_all.max()
        if hi == lo:
            raise SchemaError(f"{path}: cannot rescale a constant time column")
        rows = [(ln, s, nd, (t - lo) / (hi - lo), v) for ln, s, nd, t, v in rows]
    else:
        for lineno, _, _, t, _ in rows:
            if not 0.0 <= t <= 1.0:
                raise SchemaError(
                    f"{path}:{lineno}: time {t} outside [0, 1]; pass the rescale flag"
                )

    seen = {}
    for lineno, subject, node, t, _ in rows:
        key = (subject, node, t)
        if key in seen:
            raise SchemaError(
                f"{path}:{lineno}: duplicate (subject, node, time) first seen on line {seen[key]}"
            )
        seen[key] = lineno

    subjects = _ordered_ids({r[1] for r in rows})
    nodes = _ordered_ids({r[2] for r in rows})
    s_index = {s: i for i, s in enumerate(subjects)}
    n_index = {nd: j for j, nd in enumerate(nodes)}
    series = {}
    for _, subject, node, t, v in rows:
        series.setdefault((s_index[subject], n_index[node]), []).append((t, v))

    n, p = len(subjects), len(nodes)
    times = [[None] * p for _ in range(n)]
    values = [[None] * p for _ in range(n)]
    for i in range(n):
        for j in range(p):
            if (i, j) not in series:
                raise SchemaError(
                    f"{path}: no rows for subject {subjects[i]!r}, node {nodes[j]!r}"
                )
            pts = sorted(series[(i, j)])
            times[i][j] = np.array([q[0] for q in pts])
            values[i][j] = np.array([q[1] for q in pts])

    first = times[0][0]
    dense = all(
        times[i][j].shape == first.shape and np.array_equal(times[i][j], first)
        for i in range(n)
        for j in range(p)
    )
    return FunctionalDataset(
        n_subjects=n,
        n_nodes=p,
        times=times,
        values=values,
        design="dense" if dense else "sparse",
    )


# ---------------------------------------------------------------------------
# chain archive
# ---------------------------------------------------------------------------

def save_chain(chain, path):
    """Serialize a Chain; the payload round-trips bit-identically."""
    aux_names = sorted(chain.aux)
    header = {
        "n_nodes": chain.n_nodes,
        "block_size": chain.block_size,
        "n_data": chain.n_data,
        "n_samples": len(chain),
        "method": chain.method,
        "seed": chain.seed,
        "aux": {name: int(np.asarray(chain.aux[name]).size) for name in aux_names},
        "config": chain.config_echo,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode()
    blob = bytearray()
    blob += ARCHIVE_MAGIC
    blob += struct.pack("<I", ARCHIVE_VERSION)
    blob += struct.pack("<Q", len(header_bytes))
    blob += header_bytes
    blob += np.ascontiguousarray(chain.samples, dtype="<f8").tobytes()
    for name in aux_names:
        blob += np.ascontiguousarray(chain.aux[name], dtype="<f8").tobytes()
    blob += hashlib.sha256(blob).digest()
    with open(path, "wb") as fh:
        fh.write(bytes(blob))


def load_chain(path):
    """Read a chain archive, verifying version and checksum."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16 or blob[:4] != ARCHIVE_MAGIC:
        raise ArchiveError(f"{path}: not a chain archive")
    (version,) = struct.unpack("<I", blob[4:8])
    if version != ARCHIVE_VERSION:
        raise ArchiveVersionError(f"{path}: format version {version}, expected {ARCHIVE_VERSION}")
    if len(blob) < 48:
        raise ArchiveChecksumError(f"{path}: truncated archive")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise ArchiveChecksumError(f"{path}: checksum mismatch (truncated or corrupt)")
    (header_len,) = struct.unpack("<Q", body[8:16])
    try:
        header = json.loads(body[16 : 16 + header_len].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArchiveError(f"{path}: unreadable archive header") from exc
    d = header["n_nodes"] * header["block_size"]
    n_samples = header["n_samples"]
    offset = 16 + header_len
    need = n_samples * d * d
    payload = np.frombuffer(body, dtype="<f8", count=need, offset=offset)
    samples = payload.reshape(n_samples, d, d).copy()
    offset += need * 8
    aux = {}
    for name in sorted(header["aux"]):
        count = header["aux"][name]
        aux[name] = np.frombuffer(body, dtype="<f8", count=count, offset=offset).copy()
        offset += count * 8
    if offset != len(body):
        raise ArchiveChecksumError(f"{path}: payload length mismatch")
    return Chain(
        samples=samples,
        n_nodes=header["n_nodes"],
        block_size=header["block_size"],
        n_data=header["n_data"],
        method=header["method"],
        seed=header["seed"],
        aux=aux,
        config_echo=header["config"],
    )


# ---------------------------------------------------------------------------
# graph export
# ---------------------------------------------------------------------------

def export_graph(graph, path, fmt="csv"):
    """Write an edge list as CSV or DOT with 1-based node labels."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write("node_i,node_j,weight\n")
            for (i, j), w in graph.sorted_edges():
                fh.write(f"{i + 1},{j + 1},{w:.6f}\n")
    elif fmt == "dot":
        lines = ["graph G {"]
        lines += [f"  {i + 1};" for i in range(graph.n_nodes)]
        lines += [
            f"  {i + 1} -- {j + 1} [weight={w:.6f}];" for (i, j), w in graph.sorted_edges()
        ]
        lines.append("}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown export format {fmt!r}")


def read_edges_csv(path, n_nodes):
    """Read an exported edge list back into an EdgeGraph."""
    edges = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["node_i", "node_j", "weight"]:
            raise SchemaError(f"{path}: expected header node_i,node_j,weight")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                i, j, w = int(row[0]) - 1, int(row[1]) - 1, float(row[2])
            except (ValueError, IndexError) as exc:
                raise SchemaError(f"{path}:{lineno}: malformed edge row") from exc
            edges[(i, j)] = w
    return EdgeGraph(n_nodes=n_nodes, edges=edges)


def export_graph_comparison(graph_a, graph_b, path):
    """Joined edge table flagging edges as both / only_a / only_b."""
    if graph_a.n_nodes != graph_b.n_nodes:
        raise ValueError("graphs are over different node counts")
    keys = sorted(graph_a.edge_set() | graph_b.edge_set())
    with open(path, "w", newline="") as fh:
        fh.write("node_i,node_j,weight_a,weight_b,membership\n")
        for i, j in keys:
            in_a, in_b = graph_a.has_edge(i, j), graph_b.has_edge(i, j)
            wa = f"{graph_a.weight(i, j):.6f}" if in_a else ""
            wb = f"{graph_b.weight(i, j):.6f}" if in_b else ""
            member = "both" if in_a and in_b else ("only_a" if in_a else "only_b")
            fh.write(f"{i + 1},{j + 1},{wa},{wb},{member}\n")
