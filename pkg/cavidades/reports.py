"""
Run Summary Reports with PDF Generation
"""
from io import BytesIO

from django.utils import timezone
from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from .outputs import format_value, write_atomic

PARAM_LABELS = [
    ('delta', 'Dessintonias (Delta_1, Delta_2)'),
    ('g_m', 'Acoplamento dispersivo (g_m)'),
    ('eta', 'Acoplamento dissipativo (eta)'),
    ('kappa', 'Largura da cavidade (kappa)'),
    ('gamma_m', 'Amortecimento mecânico (gamma_m)'),
    ('j_m', 'Salto de fônons (J_m)'),
    ('alpha_in', 'Amplitude de bombeio (alpha_in)'),
]


def _styled_table(rows, widths):
    table = Table(rows, colWidths=widths)
    table.setStyle(TableStyle([
        ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor('#4f46e5')),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
        ('ALIGN', (0, 0), (-1, -1), 'CENTER'),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, 0), 11),
        ('BOTTOMPADDING', (0, 0), (-1, 0), 10),
        ('GRID', (0, 0), (-1, -1), 1, colors.black),
        ('ROWBACKGROUNDS', (0, 1), (-1, -1), [colors.lightgrey, colors.white]),
    ]))
    return table


def _text(value):
    if isinstance(value, (list, tuple)):
        return ', '.join(_text(v) for v in value)
    if isinstance(value, float):
        return format(value, '.6g')
    return format_value(value)


def build_run_report(path, command, params, summary, files):
    """
    One-page PDF with the run parameters, headline results and files written
    `params` is SystemParams.as_dict(); `summary` maps labels to values
    """
    buffer = BytesIO()
    doc = SimpleDocTemplate(buffer, pagesize=A4, title=f'EPOM - {command}', invariant=1)
    story = []
    styles = getSampleStyleSheet()

    title_style = ParagraphStyle(
        'CustomTitle',
        parent=styles['Heading1'],
        fontSize=22,
        textColor=colors.HexColor('#4f46e5'),
        spaceAfter=24,
        alignment=TA_CENTER
    )
    heading_style = ParagraphStyle(
        'CustomHeading',
        parent=styles['Heading2'],
        fontSize=15,
        textColor=colors.HexColor('#1e293b'),
        spaceAfter=10,
    )

    story.append(Paragraph(f'EPOM - Relatório de Execução ({command})', title_style))
    story.append(Paragraph(
        f"<para align=center><b>Data de Geração:</b> {timezone.now().strftime('%d/%m/%Y %H:%M')}</para>",
        styles['Normal'],
    ))
    story.append(Spacer(1, 18))

    story.append(Paragraph('Parâmetros', heading_style))
    rows = [['Parâmetro', 'Valor']]
    rows += [[label, _text(params[key])] for key, label in PARAM_LABELS]
    story.append(_styled_table(rows, [3.2 * inch, 2.6 * inch]))
    story.append(Spacer(1, 18))

    if summary:
        story.append(Paragraph('Resultados', heading_style))
        rows = [['Grandeza', 'Valor']] + [[label, _text(value)] for label, value in summary.items()]
        story.append(_styled_table(rows, [3.2 * inch, 2.6 * inch]))
        story.append(Spacer(1, 18))

    story.append(Paragraph('Arquivos', heading_style))
    rows = [['Arquivo', 'Linhas', 'SHA-256']]
    rows += [[name, _text(info.get('rows')), info['sha256'][:16]] for name, info in sorted(files.items())]
    story.append(_styled_table(rows, [2.0 * inch, 1.0 * inch, 2.8 * inch]))

    doc.build(story)
    write_atomic(path, buffer.getvalue())
    return path
