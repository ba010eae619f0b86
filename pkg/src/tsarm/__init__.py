"""Trend-seasonality augmentation recommendation for contrastive time-series learning."""
