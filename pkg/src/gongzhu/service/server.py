"""Network front ends: raw TCP, a WebSocket bridge, and the stats API.

Both transports speak the identical newline-JSON protocol; a WebSocket
text frame stands in for one line.  The HTTP app also serves the
leaderboard/matrix/epsilon endpoints, per-game replay downloads, and
the web UI bundle when one has been built.
"""

from __future__ import annotations

import asyncio
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

from fastapi import FastAPI, WebSocket
from fastapi.responses import JSONResponse

from . import protocol
from .arena import DEFAULT_TURN_TIMEOUT, GameTable, SessionClosed
from .store import RecordStore

MAX_PROTOCOL_STRIKES = 20
HANDSHAKE_TIMEOUT = 10.0
DEFAULT_TABLE = "main"

_CLOSE = object()


@dataclass
class ServiceConfig:
    store_dir: str = "arena-store"
    host: str = "127.0.0.1"
    port: int = 9000
    http_port: Optional[int] = None  # defaults to port + 1
    agents: Tuple[str, ...] = ("greed", "greed", "greed", "greed")
    turn_timeout: float = DEFAULT_TURN_TIMEOUT
    seed: int = 0
    hint_agent: Optional[str] = None
    static_dir: Optional[str] = None
    max_games: Optional[int] = None

    def fill_agents(self) -> Tuple[str, str, str, str]:
        if not self.agents:
            raise ValueError("at least one fill agent is required")
        return tuple(self.agents[i % len(self.agents)] for i in range(4))


class Session:
    """One connected client, whatever the transport."""

    _counter = 0

    def __init__(self, transport):
        Session._counter += 1
        self.session_id = Session._counter
        self.transport = transport
        self.name: Optional[str] = None
        self.table: Optional[GameTable] = None
        self.seat: Optional[int] = None
        self.alive = True
        self._plays: asyncio.Queue = asyncio.Queue()

    async def send(self, message: dict) -> None:
        if not self.alive:
            return
        try:
            await self.transport.send_line(protocol.encode(message))
        except Exception:
            self.close()

    def push_play(self, message: dict) -> None:
        self._plays.put_nowait(message)

    async def next_play(self) -> dict:
        item = await self._plays.get()
        if item is _CLOSE:
            raise SessionClosed()
        return item

    def close(self) -> None:
        if self.alive:
            self.alive = False
            self._plays.put_nowait(_CLOSE)


class TcpTransport:
    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter):
        self.reader = reader
        self.writer = writer

    async def send_line(self, data: bytes) -> None:
        self.writer.write(data)
        await self.writer.drain()

    async def receive_line(self) -> Optional[bytes]:
        try:
            line = await self.reader.readline()
        except (ValueError, ConnectionError):
            # overlong garbage or a dropped socket; treat as hangup
            return None
        return line or None


class WebSocketTransport:
    def __init__(self, websocket):
        self.websocket = websocket

    async def send_line(self, data: bytes) -> None:
        await self.websocket.send_text(data.decode().rstrip("\n"))

    async def receive_line(self) -> Optional[bytes]:
        try:
            text = await self.websocket.receive_text()
        except Exception:
            return None
        return text.encode() + b"\n"


class ArenaServer:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = RecordStore(config.store_dir)
        self.tables: Dict[str, GameTable] = {}
        self._hint_fn = (self._build_hint(config.hint_agent)
                         if config.hint_agent else None)
        self._tcp_server: Optional[asyncio.AbstractServer] = None

    @staticmethod
    def _build_hint(spec: str):
        kind, _, path = spec.partition(":")
        if kind != "scrofa" or not path:
            raise ValueError("hint agent must look like scrofa:<model-path>")
        from ..belief import weighted_value
        from ..nn import PolicyValueNet

        net = PolicyValueNet.load(path)
        return lambda view: weighted_value(view, net, use_search=False)

    def table(self, name: Optional[str]) -> GameTable:
        name = name or DEFAULT_TABLE
        if name not in self.tables:
            self.tables[name] = GameTable(
                name, self.config.fill_agents(), self.store,
                seed=self.config.seed, turn_timeout=self.config.turn_timeout,
                hint_fn=self._hint_fn, max_games=self.config.max_games)
        return self.tables[name]

    # --- session protocol ---------------------------------------------------

    async def run_session(self, transport) -> None:
        session = Session(transport)
        try:
            await self._handshake(session)
            if session.name is not None:
                await self._session_loop(session)
        finally:
            session.close()
            if session.table is not None:
                session.table.release(session)

    async def _handshake(self, session: Session) -> None:
        try:
            line = await asyncio.wait_for(session.transport.receive_line(),
                                          HANDSHAKE_TIMEOUT)
        except asyncio.TimeoutError:
            return
        if line is None:
            return
        try:
            message = protocol.decode_line(line)
            if message.get("kind") != "hello":
                raise protocol.ProtocolError("expected hello first")
            session.name = protocol.validate_hello(message)
        except protocol.ProtocolError as exc:
            await session.send(protocol.error_message(str(exc)))
            return
        await session.send(protocol.hello_reply("gongzhu-arena"))

    async def _session_loop(self, session: Session) -> None:
        strikes = 0
        while session.alive:
            line = await session.transport.receive_line()
            if line is None:
                return
            try:
                message = protocol.decode_line(line)
            except protocol.ProtocolError as exc:
                strikes += 1
                await session.send(protocol.error_message(str(exc)))
                if strikes >= MAX_PROTOCOL_STRIKES:
                    return
                continue
            kind = message["kind"]
            if kind == "seat":
                await self._handle_seat(session, message)
            elif kind == "play":
                if session.seat is None:
                    strikes += 1
                    await session.send(protocol.error_message("not seated"))
                    if strikes >= MAX_PROTOCOL_STRIKES:
                        return
                else:
                    session.push_play(message)
            else:
                strikes += 1
                await session.send(protocol.error_message(
                    f"unexpected message kind {kind!r}"))
                if strikes >= MAX_PROTOCOL_STRIKES:
                    return

    async def _handle_seat(self, session: Session, message: dict) -> None:
        if session.seat is not None:
            await session.send(protocol.error_message("already seated"))
            return
        try:
            wanted = protocol.validate_seat_request(message)
            table = self.table(message.get("table"))
            session.table = table
            session.seat = await table.claim(session, wanted)
        except protocol.ProtocolError as exc:
            session.table = None
            await session.send(protocol.error_message(str(exc)))

    # --- servers -------------------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader,
                          writer: asyncio.StreamWriter) -> None:
        try:
            await self.run_session(TcpTransport(reader, writer))
        finally:
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionError, asyncio.CancelledError):
                pass

    async def start_tcp(self) -> Tuple[str, int]:
        self._tcp_server = await asyncio.start_server(
            self._handle_tcp, self.config.host, self.config.port,
            limit=protocol.MAX_LINE_BYTES)
        host, port = self._tcp_server.sockets[0].getsockname()[:2]
        return host, port

    async def stop_tcp(self) -> None:
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
            self._tcp_server = None

    def build_app(self) -> FastAPI:
        app = FastAPI(title="gongzhu-arena")
        store = self.store

        @app.get("/api/leaderboard")
        def leaderboard():
            return {"baseline": "greed", "leaderboard": store.leaderboard()}

        @app.get("/api/matrix")
        def matrix():
            return store.matrix()

        @app.get("/api/epsilon")
        def eps():
            return store.intransitivity()

        @app.get("/api/games")
        def games():
            return {"games": [
                {"game": r.game_id, "players": list(r.players),
                 "finished": r.finished, "teams": list(r.per_team)}
                for r in store.records]}

        @app.get("/api/games/{game_id}")
        def game(game_id: str):
            record = store.get(game_id)
            if record is None:
                return JSONResponse(status_code=404,
                                    content={"error": f"unknown game "
                                                      f"{game_id!r}"})
            return {"game": record.game_id, "players": list(record.players),
                    "started": record.started, "finished": record.finished,
                    "record": record.record,
                    "scores": list(record.per_player),
                    "teams": list(record.per_team)}

        @app.get("/api/agents/{name}")
        def agent(name: str):
            summary = store.matrix()
            if name not in summary["agents"]:
                return JSONResponse(status_code=404,
                                    content={"error": f"unknown agent "
                                                      f"{name!r}"})
            i = summary["agents"].index(name)
            return {"agent": name,
                    "opponents": summary["agents"],
                    "wpg": summary["wpg"][i],
                    "games": summary["games"][i]}

        @app.websocket("/ws")
        async def websocket_endpoint(websocket: WebSocket):
            await websocket.accept()
            await self.run_session(WebSocketTransport(websocket))

        static_dir = self.config.static_dir
        if static_dir and Path(static_dir).is_dir():
            from fastapi.staticfiles import StaticFiles
            app.mount("/", StaticFiles(directory=static_dir, html=True))
        return app

    async def serve_forever(self, announce=None) -> None:
        import uvicorn

        host, tcp_port = await self.start_tcp()
        http_port = self.config.http_port
        if http_port is None:
            http_port = self.config.port + 1 if self.config.port else 0
        server = uvicorn.Server(uvicorn.Config(
            self.build_app(), host=self.config.host, port=http_port,
            log_level="warning"))
        task = asyncio.ensure_future(server.serve())
        try:
            while not server.started and not task.done():
                await asyncio.sleep(0.01)
            if announce is not None and server.started:
                bound = server.servers[0].sockets[0].getsockname()[1]
                announce(host, tcp_port, bound)
            await task
        finally:
            await self.stop_tcp()


def serve(config: ServiceConfig, announce=None) -> None:
    """Run both listeners until interrupted.

    ``announce``, when given, is called once with the host and the
    actually bound TCP and HTTP ports; useful with ``port=0``.
    """
    asyncio.run(ArenaServer(config).serve_forever(announce))
