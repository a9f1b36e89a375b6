"""
Console entry point: ``spectral-bounds verify|proofkit-audit|asymptotics [options]``.
"""
import os
import sys

SUBCOMMANDS = {
    "verify": "verify",
    "proofkit-audit": "proofkit_audit",
    "asymptotics": "asymptotics",
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(f"uso: spectral-bounds {{{','.join(SUBCOMMANDS)}}} [opções]\n")
        return 2

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "spectral_bounds.settings.production")
    from django.core.management import execute_from_command_line

    try:
        execute_from_command_line(["spectral-bounds", SUBCOMMANDS[argv[0]], *argv[1:]])
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0 if e.code is None else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
