"""Diagnostics on stderr; reports never go through here."""

from rich.console import Console

from jetvar import config

console = Console(stderr=True, highlight=False)


def log(tag, message):
    """Print a tagged diagnostic line when verbose output is enabled."""
    if config.VERBOSE:
        console.print(f"[{tag.upper()}] {message}", markup=False)


def warn(message):
    console.print(f"[WARN] {message}", markup=False, style="yellow")


def error(message):
    console.print(f"[ERROR] {message}", markup=False, style="bold red")
