from datetime import datetime, timedelta, timezone

from annosent.model import Annotation, AnnotationKind, OnAnnotation, OnDocument

T0 = datetime(2012, 3, 1, tzinfo=timezone.utc)


def ann(ann_id, parent=None, doc="D", kind=AnnotationKind.COMMENT, body="", author="A", minutes=0, page=0):
    target = OnAnnotation(parent) if parent else OnDocument(doc, page)
    return Annotation(ann_id, author, kind, body, target, T0 + timedelta(minutes=minutes))
