from django.db import models
from django.utils import timezone


class SimulationRun(models.Model):
    """
    Run Ledger
    One row per management command executed with --record
    """
    COMMAND_CHOICES = [
        ('simulate', 'Simulação'),
        ('steady', 'Estado Estacionário'),
        ('ep_scan', 'Varredura do Ponto Excepcional'),
        ('eigen_surface', 'Superfície de Autovalores'),
        ('amplitude_scan', 'Varredura de Amplitude'),
        ('bifurcation', 'Diagrama de Bifurcação'),
        ('poincare', 'Seção de Poincaré'),
        ('lyapunov', 'Expoente de Lyapunov'),
        ('beats', 'Batimentos'),
    ]

    STATUS_CHOICES = [
        ('RUNNING', 'Em Execução'),
        ('COMPLETED', 'Concluída'),
        ('FAILED', 'Falhou'),
    ]

    command = models.CharField(
        max_length=30,
        choices=COMMAND_CHOICES,
        verbose_name='Comando'
    )
    status = models.CharField(
        max_length=20,
        choices=STATUS_CHOICES,
        default='RUNNING',
        verbose_name='Status'
    )
    exit_code = models.IntegerField(
        default=0,
        verbose_name='Código de Saída'
    )
    config = models.JSONField(
        verbose_name='Configuração',
        help_text='Configuração normalizada da execução'
    )
    code_version = models.CharField(
        max_length=20,
        verbose_name='Versão do Código'
    )
    output_dir = models.CharField(
        max_length=500,
        verbose_name='Diretório de Saída'
    )
    wall_time = models.FloatField(
        null=True,
        blank=True,
        verbose_name='Tempo de Execução (s)'
    )
    error_message = models.TextField(
        blank=True,
        verbose_name='Mensagem de Erro'
    )
    created_at = models.DateTimeField(
        auto_now_add=True,
        verbose_name='Iniciada em'
    )
    finished_at = models.DateTimeField(
        null=True,
        blank=True,
        verbose_name='Finalizada em'
    )

    class Meta:
        verbose_name = 'Execução'
        verbose_name_plural = 'Execuções'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['command', '-created_at'], name='cavidades_run_cmd_idx'),
            models.Index(fields=['status'], name='cavidades_run_status_idx'),
        ]

    def __str__(self):
        return f'{self.get_command_display()} - {self.get_status_display()} ({self.output_dir})'

    @classmethod
    def start(cls, command, config, output_dir, code_version):
        """Open a ledger entry for a command that is about to run"""
        return cls.objects.create(
            command=command,
            config=config,
            output_dir=str(output_dir),
            code_version=code_version,
        )

    def mark_completed(self, wall_time, files):
        self.status = 'COMPLETED'
        self.exit_code = 0
        self.wall_time = wall_time
        self.finished_at = timezone.now()
        self.save()
        for name, info in files.items():
            self.artifacts.create(
                name=name,
                rows=info.get('rows'),
                size_bytes=info['bytes'],
                sha256=info['sha256'],
            )

    def mark_failed(self, exit_code, message, wall_time=None):
        self.status = 'FAILED'
        self.exit_code = exit_code
        self.error_message = message
        self.wall_time = wall_time
        self.finished_at = timezone.now()
        self.save()


class RunArtifact(models.Model):
    """File written by a recorded run"""
    run = models.ForeignKey(
        SimulationRun,
        on_delete=models.CASCADE,
        related_name='artifacts',
        verbose_name='Execução'
    )
    name = models.CharField(
        max_length=255,
        verbose_name='Arquivo'
    )
    rows = models.IntegerField(
        null=True,
        blank=True,
        verbose_name='Linhas'
    )
    size_bytes = models.IntegerField(
        verbose_name='Tamanho (bytes)'
    )
    sha256 = models.CharField(
        max_length=64,
        verbose_name='SHA-256'
    )

    class Meta:
        verbose_name = 'Artefato'
        verbose_name_plural = 'Artefatos'
        ordering = ['run', 'name']
        unique_together = ['run', 'name']

    def __str__(self):
        return f'{self.name} ({self.sha256[:12]})'
