"""Error taxonomy shared by the library and the CLI.

Every error carries a stable machine-readable ``kind`` so the CLI can emit
structured error JSON and language bindings can map errors one-to-one.
"""


class DTIBenchError(Exception):
    """Base class for all library errors."""

    kind = "error"

    def payload(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class ParseError(DTIBenchError):
    """Malformed input file; carries the 1-based line number when known."""

    kind = "parse-error"

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)

    def payload(self) -> dict:
        out = super().payload()
        if self.path is not None:
            out["path"] = str(self.path)
        if self.line is not None:
            out["line"] = self.line
        return out


class ValidationError(DTIBenchError):
    """Invalid data or configuration; may carry several messages at once."""

    kind = "validation-error"

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))

    def payload(self) -> dict:
        out = super().payload()
        out["errors"] = self.messages
        return out


class NotEnoughEdgesError(DTIBenchError):
    """A requested fold received zero positive edges (NEET)."""

    kind = "not-enough-edges-to-train"


class InsufficientOverlapError(DTIBenchError):
    """Global alignment left fewer than 3 residue pairs to superpose."""

    kind = "insufficient-overlap"


class MissingNodeError(DTIBenchError):
    """An operation referenced a node absent from its input; names the node."""

    kind = "missing-node"

    def __init__(self, kind_label, node_id, context=""):
        self.node_kind = kind_label
        self.node_id = node_id
        msg = f"{kind_label} '{node_id}' not found"
        if context:
            msg += f" in {context}"
        super().__init__(msg)

    def payload(self) -> dict:
        out = super().payload()
        out["node_kind"] = self.node_kind
        out["node_id"] = self.node_id
        return out


class SingleClassError(DTIBenchError):
    """Scored set or training set contains only one label."""

    kind = "single-class"


class SamplingError(DTIBenchError):
    """Negative sampling could not satisfy its contract."""

    kind = "sampling-error"


class OverlapViolationError(DTIBenchError):
    """Strict cross-dataset pairing found shared drugs or proteins."""

    kind = "sc-overlap"


class ChecksumError(DTIBenchError):
    """Fetched dataset file does not match its manifest checksum."""

    kind = "checksum-mismatch"


class ReleasedHandleError(DTIBenchError):
    """Operation attempted on a released graph handle."""

    kind = "released-handle"
