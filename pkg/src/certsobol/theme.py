"""Theme configuration for certsobol's rich console output.

Styles for the different kinds of command output (success, warning, error)
and for the result tables.
"""

from rich.theme import Theme

DEFAULT_STYLE = {
    "cmd.success": "green",
    "cmd.warning": "yellow",
    "cmd.error": "red bold",
    "cmd.table.header": "bold cyan",
    "cmd.value": "white",
    "cmd.unbounded": "magenta",
    "cmd.timing": "dim",
}

DEFAULT = Theme(DEFAULT_STYLE)
