import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('simulate', 'Simulação'), ('steady', 'Estado Estacionário'), ('ep_scan', 'Varredura do Ponto Excepcional'), ('eigen_surface', 'Superfície de Autovalores'), ('amplitude_scan', 'Varredura de Amplitude'), ('bifurcation', 'Diagrama de Bifurcação'), ('poincare', 'Seção de Poincaré'), ('lyapunov', 'Expoente de Lyapunov'), ('beats', 'Batimentos')], max_length=30, verbose_name='Comando')),
                ('status', models.CharField(choices=[('RUNNING', 'Em Execução'), ('COMPLETED', 'Concluída'), ('FAILED', 'Falhou')], default='RUNNING', max_length=20, verbose_name='Status')),
                ('exit_code', models.IntegerField(default=0, verbose_name='Código de Saída')),
                ('config', models.JSONField(help_text='Configuração normalizada da execução', verbose_name='Configuração')),
                ('code_version', models.CharField(max_length=20, verbose_name='Versão do Código')),
                ('output_dir', models.CharField(max_length=500, verbose_name='Diretório de Saída')),
                ('wall_time', models.FloatField(blank=True, null=True, verbose_name='Tempo de Execução (s)')),
                ('error_message', models.TextField(blank=True, verbose_name='Mensagem de Erro')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Iniciada em')),
                ('finished_at', models.DateTimeField(blank=True, null=True, verbose_name='Finalizada em')),
            ],
            options={
                'verbose_name': 'Execução',
                'verbose_name_plural': 'Execuções',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['command', '-created_at'], name='cavidades_run_cmd_idx'), models.Index(fields=['status'], name='cavidades_run_status_idx')],
            },
        ),
        migrations.CreateModel(
            name='RunArtifact',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=255, verbose_name='Arquivo')),
                ('rows', models.IntegerField(blank=True, null=True, verbose_name='Linhas')),
                ('size_bytes', models.IntegerField(verbose_name='Tamanho (bytes)')),
                ('sha256', models.CharField(max_length=64, verbose_name='SHA-256')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='artifacts', to='cavidades.simulationrun', verbose_name='Execução')),
            ],
            options={
                'verbose_name': 'Artefato',
                'verbose_name_plural': 'Artefatos',
                'ordering': ['run', 'name'],
                'unique_together': {('run', 'name')},
            },
        ),
    ]
