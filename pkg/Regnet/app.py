import logging
import os

import click
from dotenv import load_dotenv

from .error_codes import INPUT_ERROR, OK, RegnetError, exit_code_for

REGNET_LOG_LEVEL = 'REGNET_LOG_LEVEL'

logger = logging.getLogger('regnet')


@click.group(name='regnet', help='Network reconstruction, regularity and regulation toolkit.')
def app():
    pass


from .router import router

for command in router:
    app.add_command(command)


def setup_logging():
    level = os.environ.get(REGNET_LOG_LEVEL, 'INFO').upper()
    logging.basicConfig(level=level)
    logging.getLogger().setLevel(level)


def cli_main(argv=None):
    load_dotenv()
    setup_logging()
    try:
        app.main(args=argv, prog_name='regnet', standalone_mode=False)
        return OK
    except click.UsageError as e:
        if e.ctx is not None:
            click.echo(e.ctx.get_usage(), err=True)
        click.echo(f'Error: {e.format_message()}', err=True)
        return INPUT_ERROR
    except click.ClickException as e:
        e.show()
        return INPUT_ERROR
    except click.Abort:
        return INPUT_ERROR
    except RegnetError as e:
        logger.error(f'{type(e).__name__}: {e}')
        click.echo(f'Error: {e}', err=True)
        return exit_code_for(e)


def main():
    raise SystemExit(cli_main())
