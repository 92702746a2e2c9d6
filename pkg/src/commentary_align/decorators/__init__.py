from commentary_align.decorators.safe_execute import safe_execute

__all__ = ["safe_execute"]
