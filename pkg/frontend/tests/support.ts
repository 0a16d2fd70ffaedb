// Shared plumbing for the end-to-end tests: spawning a relay process,
// awaitable inboxes, and wiring ProtocolClient to a raw TCP socket (the
// relay speaks the same newline-delimited JSON frames over TCP and
// WebSocket, so tests can pick whichever transport they are probing).

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ChatViewModel, type ChatMessage } from "../src/chat.js";
import {
  ProtocolClient,
  type Delivery,
  type Frame,
} from "../src/protocol.js";

export class Inbox<T> {
  private items: T[] = [];
  private waiters: { resolve(t: T): void; reject(e: Error): void }[] = [];

  push(item: T): void {
    const waiter = this.waiters.shift();
    if (waiter) waiter.resolve(item);
    else this.items.push(item);
  }

  next(timeoutMs = 10000): Promise<T> {
    const ready = this.items.shift();
    if (ready !== undefined) return Promise.resolve(ready);
    return new Promise((resolve, reject) => {
      const waiter = { resolve: (t: T) => { clearTimeout(timer); resolve(t); }, reject };
      const timer = setTimeout(() => {
        this.waiters.splice(this.waiters.indexOf(waiter), 1);
        reject(new Error("timed out waiting for a delivery"));
      }, timeoutMs);
      this.waiters.push(waiter);
    });
  }

  drain(): T[] {
    const all = this.items;
    this.items = [];
    return all;
  }
}

export interface Session {
  client: ProtocolClient;
  deliveries: Inbox<Delivery>;
  sessions: Inbox<number>;
  vm: ChatViewModel;
  replays: ChatMessage[];
  socket: net.Socket | null;
}

export function makeSession(userId: string, token: string): Session {
  const deliveries = new Inbox<Delivery>();
  const sessions = new Inbox<number>();
  const replays: ChatMessage[] = [];
  const vm = new ChatViewModel(userId, {
    onReplay: (m) => replays.push(m),
  });
  const client = new ProtocolClient(userId, token, {
    onSession: (lastSeq) => sessions.push(lastSeq),
    onDelivery: (d) => {
      vm.applyDelivery(d);
      deliveries.push(d);
    },
  });
  return { client, deliveries, sessions, vm, replays, socket: null };
}

export async function connectTcp(session: Session, port: number): Promise<void> {
  const socket = net.connect({ host: "127.0.0.1", port });
  session.socket = socket;
  let buffer = "";
  socket.on("data", (chunk) => {
    buffer += chunk.toString("utf-8");
    let nl: number;
    while ((nl = buffer.indexOf("\n")) >= 0) {
      const line = buffer.slice(0, nl);
      buffer = buffer.slice(nl + 1);
      if (line.trim()) session.client.handleFrame(JSON.parse(line) as Frame);
    }
  });
  socket.on("close", () => session.client.detach());
  socket.on("error", () => {});
  await new Promise<void>((resolve, reject) => {
    socket.once("connect", () => resolve());
    socket.once("error", reject);
  });
  session.client.attach({
    send: (frame) => socket.write(JSON.stringify(frame) + "\n"),
    close: () => socket.destroy(),
  });
  await session.sessions.next();
}

export function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.listen(0, "127.0.0.1", () => {
      const { port } = probe.address() as net.AddressInfo;
      probe.close(() => resolve(port));
    });
    probe.on("error", reject);
  });
}

export interface RelayProcess {
  server: ChildProcess;
  port: number;
  stop(): Promise<void>;
}

/** Spawn `multimoji serve` with an alice/bob pair and wait for readiness. */
export async function startRelay(): Promise<RelayProcess> {
  const port = await freePort();
  const dir = mkdtempSync(join(tmpdir(), "multimoji-e2e-"));
  writeFileSync(
    join(dir, "config.json"),
    JSON.stringify({
      users: {
        alice: { token: "ta", partner: "bob" },
        bob: { token: "tb", partner: "alice" },
      },
      data_dir: dir,
      host: "127.0.0.1",
      port,
    }),
  );
  const server = spawn("multimoji", ["serve", "--config", join(dir, "config.json")], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  await new Promise<void>((resolve, reject) => {
    let out = "";
    server.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      if (out.includes("listening ")) resolve();
    });
    server.on("exit", (code) => reject(new Error(`server exited early: ${code}`)));
    setTimeout(() => reject(new Error("server did not start")), 15000);
  });
  return {
    server,
    port,
    async stop() {
      if (server.exitCode === null) {
        const exited = new Promise((resolve) => server.on("exit", resolve));
        server.kill("SIGTERM");
        await exited;
      }
    },
  };
}
