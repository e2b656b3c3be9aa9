"""Waveform CSV emission and the matching reader.

Format is fixed: header ``time,<name1>,<name2>,...``, one row per time
point, shortest round-trip decimal per value, ``\\n`` line endings, no
trailing delimiter. The reader reproduces the written arrays bit-exactly.
I/O failures surface as the builtin OSError (IOError).
"""

import numpy as np

from .transient import WaveformSet


def _format_row(values):
    return ",".join(repr(float(v)) for v in values)


def write_waveforms(wf, destination):
    """Write a WaveformSet as CSV to a path or a text file object."""
    names = wf.names
    lines = ["time," + ",".join(names) if names else "time"]
    cols = [wf.time] + [wf.columns[n] for n in names]
    for k in range(len(wf)):
        lines.append(_format_row(col[k] for col in cols))
    payload = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)


def read_waveforms(source):
    """Read CSV produced by :func:`write_waveforms` back into a WaveformSet."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise ValueError("empty waveform file")
    header = lines[0].split(",")
    if header[0] != "time":
        raise ValueError("waveform file must start with a 'time' column")
    names = header[1:]
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError("ragged waveform file")
    columns = {name: data[:, i + 1] for i, name in enumerate(names)}
    return WaveformSet(data[:, 0], columns)
