"""
Artifact files written and read by the command line.

An ``ArtifactFile`` wraps one path and knows its name, extension and SHA-256
digest. Structured artifacts (measures, trees, zeros, reports) are JSON;
tabular ones (plot data, sampled points) are CSV. All text is UTF-8 with ``\\n``
line ends and JSON keys are sorted, so equal content gives equal bytes.
"""

import os
import csv
import io
import json
import hashlib
import logging
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from .errors import ArtifactError

logger = logging.getLogger(__name__)

MEASURE_SUFFIX = ".measure.json"
TREE_SUFFIX = ".tree.json"


class ArtifactFile(object):
    def __init__(self, filepath):
        self.filepath = os.fspath(filepath)
        self.filename = os.path.basename(self.filepath)
        self.dirname = os.path.dirname(self.filepath)
        self.filetype = os.path.splitext(self.filepath)[1]
        self._hashSHA256 = None

    @property
    def exists(self) -> bool:
        return os.path.isfile(self.filepath)

    def _require(self):
        if not self.exists:
            logger.error(f"Artifact '{self.filepath}' does not exist")
            raise ArtifactError(f"File '{self.filepath}' does not exist")

    def sibling(self, suffix: str) -> "ArtifactFile":
        """Same path with ``suffix`` in place of a trailing ``.measure.json`` or extension."""
        base = self.filepath
        if base.endswith(MEASURE_SUFFIX):
            base = base[:-len(MEASURE_SUFFIX)]
        else:
            base = os.path.splitext(base)[0]
        return ArtifactFile(base + suffix)

    def read(self) -> str:
        self._require()
        with open(self.filepath, 'r', encoding='utf-8') as file:
            return file.read()

    def write(self, content: str) -> None:
        if self.dirname and not os.path.isdir(self.dirname):
            os.makedirs(self.dirname, exist_ok=True)
        with open(self.filepath, 'w', encoding='utf-8', newline='\n') as file:
            file.write(content)
        self._hashSHA256 = None
        logger.info(f"Wrote {self.filepath}")

    def write_json(self, data) -> None:
        self.write(dumps(data))

    def read_json(self):
        try:
            return json.loads(self.read())
        except json.JSONDecodeError as e:
            raise ArtifactError(f"'{self.filepath}' is not valid JSON: {e}")

    def write_csv(self, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        self.write(to_csv(header, rows))

    def read_csv(self) -> List[dict]:
        return list(csv.DictReader(io.StringIO(self.read())))

    @property
    def hashSHA256(self) -> str:
        if self._hashSHA256 is None:
            self._require()
            with open(self.filepath, 'rb') as file:
                self._hashSHA256 = hashlib.sha256(file.read()).hexdigest()
        return self._hashSHA256


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def read_points(path: Optional[str]) -> List[str]:
    """First column of a CSV of points; a header row is skipped when it does not parse."""
    rows = list(csv.reader(io.StringIO(ArtifactFile(path).read())))
    points = []
    for index, row in enumerate(rows):
        if not row or not row[0].strip():
            continue
        text = row[0].strip()
        try:
            Fraction(text)
        except ValueError:
            if index == 0:
                continue
            raise ArtifactError(f"Cannot parse point {text!r} in {path}")
        points.append(text)
    return points
