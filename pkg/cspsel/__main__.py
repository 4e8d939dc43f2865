"""Command-line entry point: ``python -m cspsel <command> [options]``."""
import os
import sys


def main():
    """Run a cspsel management command."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cspsel.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(['cspsel', *sys.argv[1:]])


if __name__ == '__main__':
    main()
