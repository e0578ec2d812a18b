import logging
import os

import pandas as pd
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

logger = logging.getLogger(__name__)

# --- Configuration for Excel Styles ---
HEADER_FILL = PatternFill(start_color='125435', end_color='125435', fill_type='solid')
BAND_FILL = PatternFill(start_color='F8F8F8', end_color='F8F8F8', fill_type='solid')
TEXT_COLOR_WHITE = Font(color='FFFFFF', bold=True)
thin_border = Border(left=Side(style='thin'),
                     right=Side(style='thin'),
                     top=Side(style='thin'),
                     bottom=Side(style='thin'))

# Summary columns shown in the workbook, with display names
COLUMN_MAPPING = {
    'block_size': 'Block size (gas)',
    'trials': 'Trials',
    'undefined_ratios': 'Undefined ratios (p_fifo = 0)',
    'ratio_lb_mean': 'p0 / p_fifo (mean)',
    'ratio_lb_std': 'p0 / p_fifo (std)',
    'ratio_ub_mean': 'r* / p_fifo (mean)',
    'ratio_ub_std': 'r* / p_fifo (std)',
    'bound_ratio_mean': 'Ratio bound (mean)',
    'bound_ratio_std': 'Ratio bound (std)',
    'gap_lower_mean': 'L - U (mean)',
    'gap_realized_mean': 'p0 - p_fifo (mean)',
    'condition_rate': 'Positive-gap condition rate',
}


def write_summary_workbook(summary: pd.DataFrame, path):
    """
    Write aggregate() output as a styled workbook: one section per
    distribution, one row per block size.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    columns = list(COLUMN_MAPPING)
    sheet_name = 'Welfare Gap Summary'

    with pd.ExcelWriter(path, engine='openpyxl') as writer:
        pd.DataFrame(columns=[COLUMN_MAPPING[c] for c in columns]).to_excel(
            writer, sheet_name=sheet_name, index=False)
        worksheet = writer.sheets[sheet_name]

        for idx in range(1, len(columns) + 1):
            header_cell = worksheet.cell(row=1, column=idx)
            header_cell.font = TEXT_COLOR_WHITE
            header_cell.fill = HEADER_FILL
            header_cell.alignment = Alignment(horizontal='center', vertical='center', wrap_text=True)
            header_cell.border = thin_border
            worksheet.column_dimensions[get_column_letter(idx)].width = 18
        worksheet.row_dimensions[1].height = 32

        row_num = 2
        for distribution, block in summary.groupby('distribution', sort=False):
            # Section header row per distribution
            last = get_column_letter(len(columns))
            worksheet.merge_cells(f'A{row_num}:{last}{row_num}')
            section_cell = worksheet[f'A{row_num}']
            section_cell.value = str(distribution).upper()
            section_cell.font = TEXT_COLOR_WHITE
            section_cell.fill = HEADER_FILL
            section_cell.alignment = Alignment(horizontal='center', vertical='center')
            section_cell.border = thin_border
            row_num += 1

            for band, (_, row_data) in enumerate(block.iterrows()):
                current_fill = BAND_FILL if band % 2 == 0 else PatternFill(fill_type=None)
                for idx, col in enumerate(columns, start=1):
                    value = row_data[col]
                    cell = worksheet.cell(row=row_num, column=idx, value=None if pd.isna(value) else value)
                    cell.fill = current_fill
                    cell.border = thin_border
                    if isinstance(value, float) and col != 'block_size':
                        cell.number_format = '0.0000'
                row_num += 1

    logger.info(f"Summary workbook written: {path}")
    return path
