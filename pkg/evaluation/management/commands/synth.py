"""
Management command to generate a synthetic benchmark with a planted best-solver rule.
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from cspsel.conf import get_setting
from evaluation.services import EvaluationError
from evaluation.synth import SynthSpec, synth_generate, write_synth


class Command(BaseCommand):
    help = 'Generate instances, runtimes.csv, solvers.txt and planted.csv'

    def add_arguments(self, parser):
        parser.add_argument('--out', required=True, help='Output directory')
        parser.add_argument('--instances', type=int, default=100, help='Number of instances')
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--margin', type=float, default=10.0, help='Seconds between best and default solver')
        parser.add_argument('--noise', type=float, default=0.0, help='Probability of replacing the planted best')
        parser.add_argument('--timeout-rate', type=float, default=0.0, help='Probability a non-best solver times out')
        parser.add_argument('--extra-solvers', type=int, default=1, help='Additional propagating solvers')
        parser.add_argument('--timeout', type=float, default=None, help='Timeout in seconds')
        parser.add_argument('--prefix', default='synth', help='Instance name prefix')

    def handle(self, *args, **options):
        try:
            spec = SynthSpec(
                n_instances=options['instances'],
                seed=options['seed'] if options['seed'] is not None else get_setting('SEED'),
                margin=options['margin'],
                noise=options['noise'],
                timeout_rate=options['timeout_rate'],
                extra_solvers=options['extra_solvers'],
                timeout_seconds=options['timeout'],
                prefix=options['prefix'],
            )
        except EvaluationError as e:
            raise CommandError(f"Invalid synth settings: {e}")

        result = synth_generate(spec)
        out = write_synth(result, Path(options['out']))
        differs = sum(1 for record in result.planted if record.default_penalty > 0)
        self.stdout.write(self.style.SUCCESS(f'Generated {spec.n_instances} instance(s) in {out}'))
        self.stdout.write(f'  Solvers: {", ".join(result.solvers.names)}')
        self.stdout.write(f'  Instances where the default is not best: {differs}')
