"""
Import/Export resources for the run ledger
"""

from import_export import fields, resources

from .models import RunArtifact, SimulationRun


class SimulationRunResource(resources.ModelResource):
    artifacts = fields.Field(column_name='artifacts')

    class Meta:
        model = SimulationRun
        fields = ('id', 'command', 'status', 'exit_code', 'code_version', 'output_dir',
                  'wall_time', 'error_message', 'created_at', 'finished_at', 'artifacts')
        export_order = fields

    def dehydrate_artifacts(self, run):
        return ';'.join(f'{a.name}:{a.sha256}' for a in run.artifacts.all())


class RunArtifactResource(resources.ModelResource):
    class Meta:
        model = RunArtifact
        fields = ('id', 'run', 'name', 'rows', 'size_bytes', 'sha256')
        export_order = fields
