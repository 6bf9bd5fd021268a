"""Base class of the one-shot command-line application.

Subclasses define ``do_*`` commands with :func:`~certsobol.command.auto_argument`.
:meth:`BaseApp.run` parses ``argv`` once, dispatches to the selected command and
turns :class:`~certsobol.errors.CertSobolError` into the matching exit code.
"""

import logging
import sys
from abc import ABCMeta
from argparse import ArgumentParser, Namespace
from functools import partial
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Set, TextIO

from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme
from rich_argparse import RichHelpFormatter

from .argument import Arg, build_parser
from .command import CommandInfo
from .errors import CertSobolError
from .theme import DEFAULT as THEME

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2


class BaseApp(object, metaclass=ABCMeta):
    """Collects the ``do_*`` commands of a subclass and runs one of them per invocation."""

    __commands__: ClassVar[Set[Any]] = set()

    COMMAND_FUNC_PREFIX: ClassVar[str] = "do_"
    DEFAULT_THEME: ClassVar[Theme] = THEME
    PROG: ClassVar[str] = "app"
    DESCRIPTION: ClassVar[Optional[str]] = None

    def __init__(
        self,
        stdout: Optional[TextIO] = None,
        *,
        console: Optional[Console] = None,
        theme: Optional[Theme] = None,
    ) -> None:
        """Initialize the application.

        :param stdout: Output stream (default: sys.stdout)
        :type stdout: Optional[TextIO]
        :param console: Rich console instance (default: creates new console)
        :type console: Optional[Console]
        :param theme: Rich theme for styling output (default: DEFAULT_THEME)
        :type theme: Optional[Theme]
        """
        self.stdout = stdout if stdout is not None else sys.stdout
        self.theme = theme or self.DEFAULT_THEME
        self.console = console or Console(file=self.stdout, theme=self.theme)
        self.command_info: Dict[str, CommandInfo] = {}
        for info in sorted((cmd.__cmd_info__(self) for cmd in self.__commands__), key=lambda info: info.name):
            if info.name in self.command_info:
                raise ValueError(f"Duplicate command name: {info.name}")
            self.command_info[info.name] = info
        self.parser = self.build_parser()

    def common_options(
        self,
        *,
        verbose: Arg[bool, "-v", "--verbose", {"help": "log debug messages"}] = False,  # noqa: F821,F722,B002
    ) -> None:
        """Options accepted by every command; override to add more."""

    def configure(self, ns: Namespace) -> None:
        """Hook called with the parsed namespace before the command runs."""
        self.setup_logging(getattr(ns, "verbose", False))

    def setup_logging(self, verbose: bool) -> None:
        package_logger = logging.getLogger(__name__.split(".")[0])
        for handler in list(package_logger.handlers):
            if isinstance(handler, RichHandler):
                package_logger.removeHandler(handler)
        handler = RichHandler(console=Console(file=sys.stderr, theme=self.theme), show_path=False)
        package_logger.addHandler(handler)
        package_logger.setLevel(logging.DEBUG if verbose else logging.INFO)

    def build_parser(self) -> ArgumentParser:
        """Root parser with one subparser per visible command, each inheriting the common options."""
        common = build_parser(
            self.common_options,
            parser_factory=partial(ArgumentParser, add_help=False),
        )
        parser = ArgumentParser(prog=self.PROG, description=self.DESCRIPTION, formatter_class=RichHelpFormatter)
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
        for info in self.command_info.values():
            subparsers.add_parser(
                info.name,
                parents=[common, info.argparser],
                help=info.help,
                description=info.argparser.description,
                formatter_class=RichHelpFormatter,
            )
        return parser

    def get_visible_commands(self) -> List[str]:
        return [info.name for info in self.command_info.values() if not info.hidden]

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Parse ``argv``, run the selected command and return the exit code.

        :param argv: Command-line arguments (default: ``sys.argv[1:]``)
        :type argv: Optional[Sequence[str]]
        :return: 0 on success, 2 on usage and configuration errors, the error's
            ``exit_code`` for other failures
        :rtype: int
        """
        try:
            ns = self.parser.parse_args(argv)
        except SystemExit as exc:
            return exc.code if isinstance(exc.code, int) else EXIT_USAGE
        info = self.command_info[ns.command]
        try:
            self.configure(ns)
            info.cmd_func(ns)
        except CertSobolError as exc:
            self.perror(f"{type(exc).__name__}: {exc}", markup=False)
            logger.debug("command %s failed", info.name, exc_info=True)
            return exc.exit_code
        return EXIT_OK

    def poutput(
        self, *objs: Any, sep: str = " ", end: str = "\n", markup: Optional[bool] = None, style: Optional[str] = None
    ) -> None:
        self.console.print(*objs, sep=sep, end=end, markup=markup, style=style)

    def perror(self, *objs: Any, sep: str = " ", end: str = "\n", markup: Optional[bool] = None) -> None:
        self.console.print(*objs, sep=sep, end=end, style="cmd.error", markup=markup)

    def psuccess(self, *objs: Any, sep: str = " ", end: str = "\n", markup: Optional[bool] = None) -> None:
        self.console.print(*objs, sep=sep, end=end, style="cmd.success", markup=markup)

    def pwarning(self, *objs: Any, sep: str = " ", end: str = "\n", markup: Optional[bool] = None) -> None:
        self.console.print(*objs, sep=sep, end=end, style="cmd.warning", markup=markup)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} commands={self.get_visible_commands()}>"

    def __init_subclass__(cls, **kwds: Any) -> None:
        super().__init_subclass__(**kwds)
        cls.__commands__ = set()
        for base in cls.__bases__:
            if issubclass(base, BaseApp):
                cls.__commands__.update(base.__commands__)
        for name in dir(cls):
            if not name.startswith(cls.COMMAND_FUNC_PREFIX):
                continue
            cls.__commands__.add(getattr(cls, name))
