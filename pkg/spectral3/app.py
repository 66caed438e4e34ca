# Copyright 2026 The Spectral3 Authors
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.

import argparse
import json
import logging
import sys

from spectral3 import coefficients
from spectral3 import config
from spectral3 import db
from spectral3 import experiments
from spectral3 import forms
from spectral3 import oscillatory
from spectral3 import report
from spectral3 import search
from spectral3 import spectral
from spectral3 import suites
from spectral3 import voronoi
from spectral3 import windows
from spectral3.errors import EXIT_FAIL, EXIT_PASS, Spectral3Error
import spectral3.version

VORONOI_KIND_NAMES = {'phi': 'Phi', 'e4': 'E4'}


class App(object):
    """One CLI invocation: configuration, logging and the run index."""

    def __init__(self, path=None, debug=False, verbose=False, tolerance=None):
        path = config.find_config(path)
        if path:
            self.config = config.Config(path)
        else:
            self.config = config.Config(data={'suites': list(config.SUITES)})
        if tolerance is not None:
            self.config.tolerance = tolerance
        if debug:
            level = logging.DEBUG
        elif verbose:
            level = logging.INFO
        else:
            level = logging.WARNING
        logging.basicConfig(filename=self.config.log_file, filemode='w',
                            format='%(asctime)s %(message)s',
                            level=level)
        self.log = logging.getLogger('spectral3.App')
        self.log.debug("Starting")
        self._db = None

    @property
    def db(self):
        if self._db is None:
            self._db = db.Database(self.config.dburi, search.SearchCompiler())
        return self._db

    def forms(self, path):
        return forms.load_forms(path or self.config.forms)

    # Each command returns (reports, payload); payload replaces the
    # report list in --json output when it is not None.

    def verifyHecke(self, args):
        if args.forms:
            data = forms.load_forms(args.forms)
        else:
            data = forms.synth_forms(args.seed, args.count, prime_bound=args.n_max)
        identities = args.identity or list(coefficients.IDENTITIES)
        reports = []
        for which in identities:
            if which == 'e4_square':
                reports.append(suites.identity_check(which, None, args.n_max))
                continue
            for i, form in enumerate(data):
                other = data.forms[(i + 1) % len(data)] if which == 'ltwo_rankin_square' else None
                reports.append(suites.identity_check(which, form, args.n_max, other))
        return reports, None

    def verifyVoronoi(self, args):
        kind = VORONOI_KIND_NAMES[args.kind.lower()]
        window = windows.SmoothWindow(args.window, args.scale)
        form = None
        if kind == 'Phi':
            if args.label:
                form = self.forms(args.forms).byLabel(args.label)
            else:
                reach = window.support()[1]
                form = forms.MaassFormData.eisenstein(args.nu, prime_bound=max(int(reach) + 1, 100))
        case = voronoi.VoronoiCase(kind, args.m, args.c, args.a, window, form)
        return [voronoi.verify_voronoi(case, include_residue=not args.no_residue)], None

    def verifyStationaryPhase(self, args):
        if args.study is None:
            tasks = suites.oscillatory_tasks(self.config)
            return self._runTasks(tasks), None
        params = oscillatory.OscillatoryParams(N=args.N, U=args.U, T=args.T, t_phi=args.t_phi,
                                               convention=args.convention, J=args.J)
        grid = args.grid or self._defaultGrid(args.study, params)
        rows = oscillatory.convergence_study(args.study, grid, params, alpha=args.alpha,
                                             J=args.J, X=args.X)
        inputs = {'study': args.study, 'grid': grid, 'alpha': args.alpha, 'J': args.J,
                  'X': args.X}
        r = report.VerificationReport.observation('stationary_phase:%s' % (args.study,),
                                                  len(rows), inputs, {'rows': rows})
        return [r], {'study': args.study, 'inputs': inputs, 'rows': rows}

    @staticmethod
    def _defaultGrid(study, params):
        if study in ('xi0', 'fj'):
            return [0.025, 0.05, 0.1, 0.2]
        if study == 'wplus':
            return [params.N, 2 * params.N, 4 * params.N]
        return [1.0, 1.001, 1.01, 1.1]

    def computeWatson(self, args):
        data = self.forms(args.forms)
        selected = [data.byLabel(args.label)] if args.label else list(data)
        reports = []
        for form in selected:
            if form.l_sym2_at_1 is None:
                self.log.warning('Skipping %s: no L(1, sym^2)' % (form.label,))
                continue
            reports.append(suites.watson_check(form))
        return reports, None

    def triple(self, args):
        basis = []
        if args.basis:
            basis = [f for f in self.forms(args.basis) if not f.isEisenstein()]
        if args.kind == 'phi':
            form = self.forms(args.forms).byLabel(args.label)
            value = spectral.phi_E3(form, args.t, basis)
            inputs = {'kind': 'phi', 'label': form.label, 't': args.t}
        else:
            value = spectral.etau_E3(args.tau, args.t, basis)
            inputs = {'kind': 'etau', 'tau': args.tau, 't': args.t}
        inputs['basis'] = len(basis)
        r = report.VerificationReport.observation('triple:%s' % (args.kind,), value.value,
                                                  inputs, value.asDict())
        return [r], None

    def varianceScan(self, args):
        result = experiments.variance_scan(self.forms(args.forms), args.T, args.delta,
                                           args.epsilon)
        return result.observations(), result.asDict()

    def largeSieve(self, args):
        if args.forms:
            data = forms.load_forms(args.forms)
        else:
            data = forms.synth_forms(args.seed, args.count, t_range=suites.SIEVE_T_RANGE,
                                     prime_bound=max(suites.SIEVE_PRIME_BOUND, 2 * args.N))
        result = experiments.large_sieve_ratio(args.which, data, args.N, args.T, args.delta,
                                               X=args.X, epsilon=args.epsilon, seed=args.seed)
        return result.observations(), result.asDict()

    def synth(self, args):
        data = forms.synth_forms(args.seed, args.count, (args.t_min, args.t_max),
                                 args.prime_bound)
        if args.output is None:
            if args.json:
                return None, json.loads(forms.dump_forms(data))
            sys.stdout.write(forms.dump_forms(data))
            return None, None
        forms.write_forms(data, args.output)
        r = report.VerificationReport.observation(
            'synth', len(data), {'seed': args.seed, 'count': args.count},
            {'path': args.output, 'labels': [f.label for f in data]})
        return [r], None

    def _runTasks(self, tasks):
        reports, errors = suites.run_suites(self.config, tasks)
        self.errors.extend(errors)
        return [r for _, r in reports]

    def runSuite(self, args):
        if args.suite:
            tolerance = self.config.tolerance
            self.config = config.Config(data=dict(self.config.asDict(), suites=args.suite))
            self.config.tolerance = tolerance
        if args.workers:
            self.config.workers = args.workers
        tasks = suites.plan(self.config)
        if args.dry_run:
            planned = [{'suite': t.suite, 'check': t.name} for t in tasks]
            if not args.json:
                for item in planned:
                    print('%s:%s' % (item['suite'], item['check']))
                return None, None
            return None, {'planned': planned}
        pairs, errors = suites.run_suites(self.config, tasks)
        pairs = [(s, suites.retolerate(r, self.config.tolerance)) for s, r in pairs]
        reports = [r for _, r in pairs]
        data = self.config.asDict()
        name = report.run_name(data)
        path = report.write_bundle(self.config.report_dir, name, reports, data, errors)
        with self.db.getSession() as session:
            session.recordReports(name, report.config_hash(data), pairs, path, errors)
        self.errors = errors
        self.log.info('Run %s: %s reports, %s errors' % (name, len(reports), len(errors)))
        return reports, None

    def listReports(self, args):
        with self.db.getSession() as session:
            results = session.getCheckResults(args.query)
            rows = [{'run': r.run.name, 'suite': r.suite, 'check': r.check,
                     'passed': r.passed, 'abs_err': r.abs_err, 'rel_err': r.rel_err,
                     'tolerance': r.tolerance, 'runtime': r.runtime, 'error': r.error}
                    for r in results]
        if args.json:
            return None, {'results': rows}
        for row in rows:
            print('%s %s %s:%s rel_err=%s%s' % (
                row['run'], 'PASS' if row['passed'] else 'FAIL', row['suite'], row['check'],
                row['rel_err'], ' error=%s' % (row['error'],) if row['error'] else ''))
        return None, None

    def run(self, args):
        self.errors = []
        reports, payload = getattr(self, args.command)(args)
        if reports is not None and self.config.tolerance is not None:
            reports = [suites.retolerate(r, self.config.tolerance) for r in reports]
        emit(args, reports, payload, self.errors)
        if self.errors:
            return max(e['exit_code'] for e in self.errors)
        if reports and not all(r.passed for r in reports):
            return EXIT_FAIL
        return EXIT_PASS


def emit(args, reports, payload, errors=()):
    if reports is None and payload is None and not errors:
        return
    if args.json:
        if payload is None:
            payload = {'reports': [r.asDict() for r in reports or []]}
        if errors:
            payload['errors'] = report._jsonable(list(errors))
        json.dump(report._jsonable(payload), sys.stdout, indent=2)
        sys.stdout.write('\n')
    elif args.csv:
        report.write_csv(sys.stdout, reports or [])
    else:
        for r in reports or []:
            print('%s %s rel_err=%.3g tol=%.3g' % ('PASS' if r.passed else 'FAIL', r.check,
                                                   r.rel_err, r.tolerance))
        for e in errors:
            print('ERROR %s:%s %s: %s' % (e['suite'], e['check'], e['error'], e['message']))


def emit_error(error, as_json):
    if hasattr(error, 'asDict'):
        info = error.asDict()
    else:
        info = {'error': error.__class__.__name__, 'message': str(error)}
    if as_json:
        json.dump({'errors': [report._jsonable(info)]}, sys.stdout, indent=2)
        sys.stdout.write('\n')
    else:
        sys.stderr.write('error: %s: %s\n' % (info['error'], info['message']))


def version():
    return "Spectral3 version: %s" % spectral3.version.version_info.release_string()


def float_list(value):
    return [float(x) for x in value.split(',') if x.strip()]


def add_forms_argument(parser, help='forms file (default: the shipped fixture)'):
    parser.add_argument('--forms', dest='forms', help=help)


def build_parser():
    parser = argparse.ArgumentParser(
        description='Verification workbench for degree-four automorphic L-functions.')
    parser.add_argument('-c', dest='path',
                        help='path to config file')
    parser.add_argument('-v', dest='verbose', action='store_true',
                        help='enable more verbose logging')
    parser.add_argument('-d', dest='debug', action='store_true',
                        help='enable debug logging')
    parser.add_argument('--version', dest='version', action='version',
                        version=version(),
                        help='show Spectral3\'s version')
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument('--json', dest='json', action='store_true',
                        help='print reports as JSON')
    output.add_argument('--csv', dest='csv', action='store_true',
                        help='print reports as CSV')
    output.add_argument('--tol', dest='tol', type=float,
                        help='override the tolerance of floating-point checks')
    commands = parser.add_subparsers(dest='command_name', metavar='command')
    commands.required = True

    p = commands.add_parser('verify-hecke', parents=[output],
                            help='coefficient identities against Dirichlet convolution')
    p.add_argument('--identity', action='append', choices=coefficients.IDENTITIES)
    p.add_argument('--n-max', dest='n_max', type=int, default=config.DEFAULT_N_MAX)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--count', type=int, default=5)
    add_forms_argument(p, 'forms file (default: synthetic forms)')
    p.set_defaults(command='verifyHecke')

    p = commands.add_parser('verify-voronoi', parents=[output],
                            help='both sides of the degree-4 Voronoi formula')
    p.add_argument('--kind', default='e4', type=str.lower, choices=sorted(VORONOI_KIND_NAMES))
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--c', type=int, default=1)
    p.add_argument('--a', type=int, default=1)
    p.add_argument('--window', default='gauss', choices=('gauss', 'cos', 'bump', 'dyadic'))
    p.add_argument('--scale', type=float, default=30.0)
    p.add_argument('--nu', type=float, default=suites.VORONOI_NU,
                   help='spectral parameter of the Eisenstein form used for kind phi')
    p.add_argument('--label', help='use this form from --forms for kind phi')
    p.add_argument('--no-residue', dest='no_residue', action='store_true',
                   help='leave out the polar term')
    add_forms_argument(p)
    p.set_defaults(command='verifyVoronoi')

    p = commands.add_parser('verify-stationary-phase', parents=[output],
                            help='stationary-phase convergence checks and tables')
    p.add_argument('--study', choices=oscillatory.STUDIES)
    p.add_argument('--grid', type=float_list, help='comma separated grid points')
    p.add_argument('--alpha', type=float, default=1.0)
    p.add_argument('--J', dest='J', type=int, default=4)
    p.add_argument('--X', dest='X', type=float, default=1.0)
    p.add_argument('--N', dest='N', type=float, default=1e4)
    p.add_argument('--U', dest='U', type=float, default=1.0)
    p.add_argument('--T', dest='T', type=float, default=1e3)
    p.add_argument('--t-phi', dest='t_phi', type=float, default=2.0)
    p.add_argument('--convention', default='exact', choices=oscillatory.PHASE_CONVENTIONS)
    p.set_defaults(command='verifyStationaryPhase')

    p = commands.add_parser('compute-watson', parents=[output],
                            help='Watson triple-product values of the forms')
    p.add_argument('--form', dest='label', help='form label (default: all forms)')
    add_forms_argument(p)
    p.set_defaults(command='computeWatson')

    p = commands.add_parser('triple', parents=[output],
                            help='<phi_k, E_t^3> or <E_tau, E_t^3>_reg')
    p.add_argument('--kind', choices=('phi', 'etau'), default='etau')
    p.add_argument('--t', dest='t', type=float, required=True)
    p.add_argument('--tau', type=float, default=1.0)
    p.add_argument('--form', dest='label', help='form label for kind phi')
    p.add_argument('--basis', help='forms file spanning the cusp sum (default: none)')
    add_forms_argument(p)
    p.set_defaults(command='triple')

    p = commands.add_parser('variance-scan', parents=[output],
                            help='sum of Watson values over a spectral window')
    p.add_argument('--T', dest='T', type=float, required=True)
    p.add_argument('--delta', type=float, required=True)
    p.add_argument('--epsilon', type=float, default=experiments.DEFAULT_EPSILON)
    add_forms_argument(p)
    p.set_defaults(command='varianceScan')

    p = commands.add_parser('large-sieve', parents=[output],
                            help='spectral large sieve ratios and duality')
    p.add_argument('--which', choices=experiments.SIEVE_KINDS, required=True)
    p.add_argument('--N', dest='N', type=int, default=20)
    p.add_argument('--T', dest='T', type=float, required=True)
    p.add_argument('--delta', type=float)
    p.add_argument('--X', dest='X', type=float)
    p.add_argument('--epsilon', type=float, default=experiments.DEFAULT_EPSILON)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--count', type=int, default=5)
    add_forms_argument(p, 'forms file (default: synthetic forms)')
    p.set_defaults(command='largeSieve')

    p = commands.add_parser('synth', parents=[output],
                            help='write reproducible synthetic forms')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--count', type=int, default=5)
    p.add_argument('--t-min', dest='t_min', type=float, default=10.0)
    p.add_argument('--t-max', dest='t_max', type=float, default=30.0)
    p.add_argument('--prime-bound', dest='prime_bound', type=int, default=100)
    p.add_argument('-o', dest='output', help='output path (default: stdout)')
    p.set_defaults(command='synth')

    p = commands.add_parser('run-suite', parents=[output],
                            help='run the configured verification suites')
    p.add_argument('--suite', action='append',
                   help='suite to run (default: those in the config file)')
    p.add_argument('--workers', type=int)
    p.add_argument('--dry-run', dest='dry_run', action='store_true',
                   help='list the planned checks without running them')
    p.set_defaults(command='runSuite')

    p = commands.add_parser('list-reports', parents=[output],
                            help='query the run index')
    p.add_argument('--query', help='e.g. "suite:voronoi and status:fail"')
    p.set_defaults(command='listReports')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        app = App(args.path, args.debug, args.verbose, args.tol)
        status = app.run(args)
    except Spectral3Error as e:
        emit_error(e, args.json)
        return e.exit_code
    return status


if __name__ == '__main__':
    sys.exit(main())
