"""Markdown template for run reports."""

RUN_REPORT_TEMPLATE = """# {{ title }}

## Configuration
{% for key, value in config.items() -%}
- **{{ key }}**: {{ value }}
{% endfor %}
{%- if reports %}

## Gain
| Label | Branch | Re Ω (rad/s) | Im Ω (rad/s) | Regime | Threshold margin |
|---|---|---|---|---|---|
{% for label, report in reports -%}
| {{ label }} | {{ report.branch.value }} | {{ "%.6g"|format(report.gain_rate.re) }} | {{ "%.6g"|format(report.gain_rate.im) }} | {{ report.regime.value }} | {{ "%.4g"|format(report.threshold_margin) }} |
{% endfor %}
{%- endif %}
{%- if findings %}

## Findings
{% for finding in findings -%}
- {{ finding }}
{% endfor %}
{%- endif %}
{%- if warnings %}

## Warnings
{% for warning in warnings -%}
- {{ warning }}
{% endfor %}
{%- endif %}

## Outputs
{% for path in outputs -%}
- `{{ path }}`
{% endfor %}
"""
