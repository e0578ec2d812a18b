# module_cli/__init__.py

from .commands import EXIT_INPUT, EXIT_IO, EXIT_OK, build_pack_report, cmd_pack, cmd_plot, cmd_sweep
from .parsers import CliConfig, load_cli_config, parse_instance_file
