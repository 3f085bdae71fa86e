from .config import RunConfig
from .io import format_field, parse_field, read_field, write_field

__all__ = ["RunConfig", "format_field", "parse_field", "read_field", "write_field"]
