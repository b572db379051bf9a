from django.db import IntegrityError
from django.test import TestCase

from cavidades.models import RunArtifact, SimulationRun
from cavidades.resources import RunArtifactResource, SimulationRunResource

FILES = {
    'ep_scan.csv': {'sha256': 'a' * 64, 'bytes': 120, 'rows': 3},
    'manifest.json': {'sha256': 'b' * 64, 'bytes': 80, 'rows': None},
}


class SimulationRunTest(TestCase):

    def setUp(self):
        self.run = SimulationRun.start('ep_scan', {'units': 'gm'}, 'out/ep', '1.0.0')

    def test_new_run_is_running(self):
        self.assertEqual(self.run.status, 'RUNNING')
        self.assertIsNone(self.run.finished_at)
        self.assertIn('Varredura do Ponto Excepcional', str(self.run))

    def test_completion_records_artifacts(self):
        self.run.mark_completed(1.25, FILES)
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, 'COMPLETED')
        self.assertEqual(self.run.exit_code, 0)
        self.assertIsNotNone(self.run.finished_at)
        self.assertEqual(self.run.artifacts.count(), 2)
        self.assertIsNone(self.run.artifacts.get(name='manifest.json').rows)

    def test_failure(self):
        self.run.mark_failed(3, 'No converged steady state on the scan grid', 0.5)
        self.run.refresh_from_db()
        self.assertEqual(self.run.status, 'FAILED')
        self.assertEqual(self.run.exit_code, 3)
        self.assertEqual(self.run.artifacts.count(), 0)

    def test_artifact_names_are_unique_per_run(self):
        RunArtifact.objects.create(run=self.run, name='x.csv', size_bytes=1, sha256='c' * 64)
        with self.assertRaises(IntegrityError):
            RunArtifact.objects.create(run=self.run, name='x.csv', size_bytes=1, sha256='d' * 64)


class ExportResourceTest(TestCase):

    def test_runs_export_with_their_artifacts(self):
        run = SimulationRun.start('steady', {}, 'out', '1.0.0')
        run.mark_completed(0.1, FILES)
        dataset = SimulationRunResource().export()
        self.assertEqual(len(dataset), 1)
        self.assertIn('artifacts', dataset.headers)
        artifacts = dataset.dict[0]['artifacts']
        self.assertIn('ep_scan.csv:' + 'a' * 64, artifacts)

    def test_artifacts_export(self):
        run = SimulationRun.start('steady', {}, 'out', '1.0.0')
        run.mark_completed(0.1, FILES)
        dataset = RunArtifactResource().export()
        self.assertEqual(len(dataset), 2)
        self.assertEqual(sorted(dataset['name']), ['ep_scan.csv', 'manifest.json'])
