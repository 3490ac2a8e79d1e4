import os
import sys
import json
import tempfile
import datetime
from typing import Optional

import numpy as np
import pandas as pd

CSV_FLOAT_FORMAT = '%.17g'


def _to_builtin(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return str(value)


class ResultFile:
    """
    A result table or document together with the metadata needed to rerun it:
    tool version, subcommand, full parameter set, seed and library versions.
    """

    def __init__(self, meta: dict, table: Optional[pd.DataFrame] = None, document=None):
        if table is None and document is None:
            raise ValueError("A result file needs a table or a document")
        self.meta = dict(meta)
        self.table = table
        self.document = document

    def stamp(self, when: datetime.datetime = None):
        when = when or datetime.datetime.now(datetime.timezone.utc)
        self.meta["generated"] = when.isoformat(timespec='seconds')
        return self

    def _payload(self):
        if self.document is not None:
            return self.document
        return self.table.to_dict(orient='records')

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "data": self._payload()}, indent=2, default=_to_builtin) + "\n"

    def to_csv(self) -> str:
        if self.table is None:
            raise ValueError(f"'{self.meta.get('subcommand')}' results have no tabular form, use --format json")
        header = []
        for key, value in self.meta.items():
            text = value if isinstance(value, str) else json.dumps(value, sort_keys=True, default=_to_builtin)
            header.append(f"# {key}: {text}\n")
        return "".join(header) + self.table.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")

    def render(self, file_format: str) -> str:
        if file_format == 'json':
            return self.to_json()
        if file_format == 'csv':
            return self.to_csv()
        raise ValueError(f"Unknown format '{file_format}'")

    def save(self, path: Optional[str], file_format: str):
        """
        Writes to stdout when path is None; otherwise replaces path atomically
        once the full payload has been rendered.
        """
        rendered = self.render(file_format)
        if path is None:
            sys.stdout.write(rendered)
            sys.stdout.flush()
            return
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp_path = tempfile.mkstemp(prefix='.fockstat-', suffix='.tmp', dir=directory)
        try:
            with os.fdopen(fd, 'w', newline='') as f:
                f.write(rendered)
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
