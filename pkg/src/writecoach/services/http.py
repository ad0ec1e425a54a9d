"""HTTP and websocket surface.

Thin by design: request bodies are validated with pydantic, auth is a bearer
token dependency, and everything else delegates to the session service and
the store. Domain errors map onto status codes here and nowhere else.
"""

from __future__ import annotations

import anyio
from fastapi import Depends, FastAPI, Request, Response, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from writecoach.core.ladder import (
    EmptyDocument,
    EmptyRevision,
    InvalidTransition,
    RevisionLimitExceeded,
    Session,
    SentenceStatus,
)
from writecoach.core.summary import session_summary
from writecoach.gateway.config import InvalidModelConfig, ModelConfig
from writecoach.gateway.errors import UnknownBackend
from writecoach.persistence.store import NotFound
from writecoach.services.auth import AuthError, Role, RoleToken, issue_token, verify_token
from writecoach.services.runtime import ServiceRuntime

_STAFF = (Role.TEACHER, Role.RESEARCHER)


class DocumentIn(BaseModel):
    text: str
    backend_id: str
    model_name: str
    temperature: float = 0.0
    max_tokens: int = 256
    timeout_ms: int = 30_000
    task_ref: str | None = None


class RevisionIn(BaseModel):
    text: str


class CourseIn(BaseModel):
    name: str = Field(min_length=1)


class TaskIn(BaseModel):
    prompt_text: str = Field(min_length=1)
    guidelines: str = ""


class ReportIn(BaseModel):
    filter: dict


class TokenIn(BaseModel):
    user: str = Field(min_length=1)
    role: Role


def session_view(session: Session) -> dict:
    """Shape one session for clients: records plus derived reading aids."""
    summary = session_summary(session)
    sentences = []
    for record in session.sentences:
        final = record.verdicts[-1] if record.verdicts else None
        unresolved = record.status is SentenceStatus.UNRESOLVED
        sentences.append(
            {
                "index": record.unit.index,
                "text": record.unit.text,
                "char_range": [record.unit.start, record.unit.end],
                "status": record.status.value,
                "current_level": record.current_level,
                "active_text": record.active_text,
                "revisions": list(record.revisions),
                "revisions_left": max(0, 3 - len(record.revisions)),
                "delivered_hints": [
                    {"level": level, "hint": hint} for level, hint in record.delivered_hints()
                ],
                "hint_level_used": record.hint_level_used,
                "suggested_correction": final.correction if unresolved and final else None,
                "explanation": final.explanation if unresolved and final else None,
            }
        )
    return {
        "session_id": session.id,
        "owner": session.owner,
        "task_ref": session.task_ref,
        "model": session.model_config.to_dict(),
        "created_at": session.created_at,
        "updated_at": session.updated_at,
        "sentences": sentences,
        "progress": {
            "total_sentences": summary.total_sentences,
            "errors_identified": summary.errors_identified,
            "errors_corrected": summary.errors_corrected,
            "unresolved": summary.unresolved,
            "per_level_counts": {str(k): v for k, v in summary.per_level_counts.items()},
        },
    }


def create_app(runtime: ServiceRuntime) -> FastAPI:
    app = FastAPI(title="writecoach", version="0.1.0")
    secret = runtime.config.http.auth_secret
    service = runtime.service

    def current_user(request: Request) -> RoleToken:
        header = request.headers.get("authorization", "")
        scheme, _, token = header.partition(" ")
        if scheme.lower() != "bearer" or not token:
            raise AuthError("missing bearer token")
        return verify_token(secret, token, clock=service.clock)

    def require_staff(user: RoleToken) -> None:
        if user.role not in _STAFF:
            raise _Forbidden(f"role {user.role.value} may not access this resource")

    class _Forbidden(Exception):
        pass

    @app.exception_handler(AuthError)
    async def _auth_error(request, exc):
        return JSONResponse({"detail": str(exc)}, status_code=401)

    @app.exception_handler(_Forbidden)
    async def _forbidden(request, exc):
        return JSONResponse({"detail": str(exc)}, status_code=403)

    @app.exception_handler(NotFound)
    async def _not_found(request, exc):
        return JSONResponse({"detail": str(exc)}, status_code=404)

    @app.exception_handler(InvalidTransition)
    async def _conflict(request, exc):
        return JSONResponse({"detail": str(exc)}, status_code=409)

    @app.exception_handler(RevisionLimitExceeded)
    async def _limit(request, exc):
        return JSONResponse({"detail": str(exc)}, status_code=409)

    for bad_input in (EmptyDocument, EmptyRevision, InvalidModelConfig, UnknownBackend):

        @app.exception_handler(bad_input)
        async def _unprocessable(request, exc):
            return JSONResponse({"detail": str(exc)}, status_code=422)

    if runtime.config.http.dev_token_endpoint:

        @app.post("/api/dev/token")
        def dev_token(body: TokenIn):
            token = issue_token(
                secret,
                body.user,
                body.role,
                ttl_s=runtime.config.http.token_ttl_s,
                clock=service.clock,
            )
            return {"token": token, "user": body.user, "role": body.role.value}

    @app.get("/api/models")
    def list_models(user: RoleToken = Depends(current_user)):
        return {"models": [d.to_dict() for d in runtime.registry.list_backends()]}

    @app.post("/api/documents", status_code=201)
    def create_document(body: DocumentIn, user: RoleToken = Depends(current_user)):
        config = ModelConfig(
            backend_id=body.backend_id,
            model_name=body.model_name,
            temperature=body.temperature,
            max_tokens=body.max_tokens,
            timeout_ms=body.timeout_ms,
        )
        if body.task_ref:
            session = service.start_task_session(user.user_id, body.task_ref, body.text, config)
        else:
            session = service.start_document(user.user_id, body.text, config)
        return {"session_id": session.id, "sentence_count": len(session.sentences)}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str, user: RoleToken = Depends(current_user)):
        session = service.get_session(session_id)
        if session.owner != user.user_id and user.role not in _STAFF:
            raise _Forbidden("only the owner or staff may view a session")
        return session_view(session)

    @app.post("/api/sessions/{session_id}/sentences/{index}/revisions", status_code=202)
    def post_revision(
        session_id: str, index: int, body: RevisionIn, user: RoleToken = Depends(current_user)
    ):
        session = service.get_session(session_id)
        if session.owner != user.user_id:
            raise _Forbidden("only the session owner may submit revisions")
        correlation_id = service.submit_revision(session_id, index, body.text)
        return {"correlation_id": correlation_id}

    @app.post("/api/courses", status_code=201)
    def create_course(body: CourseIn, user: RoleToken = Depends(current_user)):
        if user.role is not Role.TEACHER:
            raise _Forbidden("only teachers create courses")
        course = service.create_course(user.user_id, body.name)
        return course.to_dict()

    @app.post("/api/courses/{course_id}/tasks", status_code=201)
    def create_task(course_id: str, body: TaskIn, user: RoleToken = Depends(current_user)):
        if user.role is not Role.TEACHER:
            raise _Forbidden("only teachers add tasks")
        task = service.add_task(course_id, body.prompt_text, body.guidelines)
        return task.to_dict()

    @app.get("/api/courses")
    def list_courses(user: RoleToken = Depends(current_user)):
        if user.role is not Role.TEACHER:
            raise _Forbidden("only teachers list courses")
        courses = []
        for course in runtime.store.list_courses():
            data = course.to_dict()
            data["tasks"] = [t.to_dict() for t in runtime.store.list_tasks(course.id)]
            courses.append(data)
        return {"courses": courses}

    @app.post("/api/reports", status_code=202)
    def request_report(body: ReportIn, user: RoleToken = Depends(current_user)):
        require_staff(user)
        report_id = service.request_report(user.user_id, body.filter)
        return {"report_id": report_id}

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str, user: RoleToken = Depends(current_user)):
        require_staff(user)
        content = runtime.store.load_report(report_id)
        return Response(
            content=content,
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": f'attachment; filename="{report_id}.csv"'},
        )

    @app.websocket("/rt")
    async def realtime(websocket: WebSocket):
        token = websocket.query_params.get("token", "")
        try:
            claims = verify_token(secret, token, clock=service.clock)
        except AuthError:
            await websocket.close(code=4401)
            return
        await websocket.accept()
        subscription = runtime.hub.connect(claims.user_id)
        try:
            async with anyio.create_task_group() as task_group:

                async def forward() -> None:
                    try:
                        while True:
                            event = await anyio.to_thread.run_sync(subscription.get, 0.2)
                            if event is not None:
                                await websocket.send_json(event.to_dict())
                    except (WebSocketDisconnect, RuntimeError):
                        task_group.cancel_scope.cancel()

                task_group.start_soon(forward)
                try:
                    while True:
                        # Client frames are ignored; this loop exists to
                        # notice the disconnect and tear everything down.
                        await websocket.receive_text()
                except WebSocketDisconnect:
                    pass
                finally:
                    task_group.cancel_scope.cancel()
        finally:
            subscription.close()

    return app
