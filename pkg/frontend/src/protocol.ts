// Session logic for the relay's newline-delimited JSON frame protocol.
//
// ProtocolClient is transport-agnostic: attach() a Transport once the
// underlying connection is open, feed inbound frames to handleFrame(), and
// call detach() when the connection drops. Operations (msg, replay) are
// numbered from one per-user counter resumed at hello_ok's last_seq, kept
// in an outbox, and resent after every reconnect until acked, which is what
// makes delivery exactly-once from the user's point of view. Inbound
// deliveries are de-duplicated per sender and acknowledged cumulatively.

export type Frame = { type: string } & Record<string, unknown>;

export interface Transport {
  send(frame: Frame): void;
  close(): void;
}

export type MessageRef = [sender: string, seq: number];

export interface PendingOp {
  kind: "msg" | "replay";
  seq: number | null;
  body: string;
  events: [number, string, string][];
  ts: number;
  messageId: MessageRef | null;
}

export interface Delivery {
  kind: "msg" | "replay_event";
  sender: string;
  seq: number;
  ts: number;
  body: string;
  messageId: MessageRef;
}

export interface Recommendation {
  target: string;
  order: string[];
  scores: { id: string; p: number; tf_idf: number; r: number }[];
}

export interface ClientEvents {
  onSession?(lastSeq: number): void;
  onDelivery?(delivery: Delivery): void;
  onAck?(op: PendingOp): void;
  onError?(code: string, detail: string, seq: number | null): void;
  onDetach?(): void;
}

interface RecommendWaiter {
  resolve(rec: Recommendation): void;
  reject(err: Error): void;
}

export class ProtocolClient {
  readonly userId: string;
  readonly token: string;
  sessionUp = false;
  lastSeq = 0;

  private readonly handlers: ClientEvents;
  private transport: Transport | null = null;
  private outbox: PendingOp[] = [];
  private nextSeq = 1;
  private nextCorr = 1;
  private observed = new Map<string, number>();
  private recommends = new Map<number, RecommendWaiter>();

  constructor(userId: string, token: string, handlers: ClientEvents = {}) {
    this.userId = userId;
    this.token = token;
    this.handlers = handlers;
  }

  get pendingOps(): readonly PendingOp[] {
    return this.outbox;
  }

  attach(transport: Transport): void {
    this.transport = transport;
    transport.send({
      type: "hello",
      seq: this.nextCorr,
      user_id: this.userId,
      token: this.token,
    });
  }

  detach(): void {
    this.transport = null;
    this.sessionUp = false;
    const waiters = [...this.recommends.values()];
    this.recommends.clear();
    for (const w of waiters) w.reject(new Error("disconnected"));
    this.handlers.onDetach?.();
  }

  sendBody(body: string, events: [number, string, string][] = [], ts = Date.now()): PendingOp {
    const op: PendingOp = { kind: "msg", seq: null, body, events, ts, messageId: null };
    this.submit(op);
    return op;
  }

  replay(messageId: MessageRef, ts = Date.now()): PendingOp {
    const op: PendingOp = { kind: "replay", seq: null, body: "", events: [], ts, messageId };
    this.submit(op);
    return op;
  }

  recommend(target: string, selected: [string, string][]): Promise<Recommendation> {
    const corr = this.nextCorr++;
    const frame: Frame = {
      type: "recommend",
      seq: corr,
      target,
      selected: selected.map((pair) => [pair[0], pair[1]]),
    };
    return new Promise((resolve, reject) => {
      if (!this.transport || !this.sessionUp) {
        reject(new Error("not connected"));
        return;
      }
      this.recommends.set(corr, { resolve, reject });
      this.transport.send(frame);
    });
  }

  handleFrame(frame: Frame): void {
    switch (frame.type) {
      case "hello_ok":
        this.onHelloOk(frame);
        break;
      case "ack": {
        const seq = frame.seq as number;
        const idx = this.outbox.findIndex((op) => op.seq === seq);
        if (idx >= 0) {
          const [op] = this.outbox.splice(idx, 1);
          this.handlers.onAck?.(op);
        }
        break;
      }
      case "msg":
      case "replay_event":
        this.onDelivery(frame);
        break;
      case "recommend_ok": {
        const waiter = this.recommends.get(frame.seq as number);
        if (waiter) {
          this.recommends.delete(frame.seq as number);
          waiter.resolve({
            target: frame.target as string,
            order: frame.order as string[],
            scores: frame.scores as Recommendation["scores"],
          });
        }
        break;
      }
      case "error": {
        const seq = (frame.seq as number | undefined) ?? null;
        const code = (frame.code as string) ?? "";
        const detail = (frame.detail as string) ?? "";
        const waiter = seq !== null ? this.recommends.get(seq) : undefined;
        if (waiter) {
          this.recommends.delete(seq as number);
          waiter.reject(new Error(`${code}: ${detail}`));
        } else {
          // A rejected op stays in the outbox; dropping it is the
          // application's call, not the transport's.
          this.handlers.onError?.(code, detail, seq);
        }
        break;
      }
      default:
        this.handlers.onError?.("bad_frame", `unexpected frame type ${frame.type}`, null);
    }
  }

  private onHelloOk(frame: Frame): void {
    this.sessionUp = true;
    this.lastSeq = (frame.last_seq as number) ?? 0;
    this.nextSeq = Math.max(this.nextSeq, this.lastSeq + 1);
    for (const op of this.outbox) {
      if (op.seq === null) op.seq = this.nextSeq++;
    }
    for (const op of this.outbox) {
      this.transport?.send(this.opFrame(op));
    }
    this.handlers.onSession?.(this.lastSeq);
  }

  private onDelivery(frame: Frame): void {
    const sender = (frame.type === "msg" ? frame.sender_id : frame.initiator_id) as string;
    const seq = frame.seq as number;
    if (seq > (this.observed.get(sender) ?? 0)) {
      this.observed.set(sender, seq);
      const rawRef = frame.message_id as [string, number] | undefined;
      this.handlers.onDelivery?.({
        kind: frame.type as "msg" | "replay_event",
        sender,
        seq,
        ts: frame.ts as number,
        body: frame.body as string,
        messageId: rawRef ? [rawRef[0], rawRef[1]] : [sender, seq],
      });
    }
    this.transport?.send({
      type: "ack",
      sender_id: sender,
      seq: this.observed.get(sender),
    });
  }

  private submit(op: PendingOp): void {
    this.outbox.push(op);
    if (this.sessionUp && this.transport) {
      op.seq = this.nextSeq++;
      this.transport.send(this.opFrame(op));
    }
  }

  private opFrame(op: PendingOp): Frame {
    if (op.kind === "msg") {
      const frame: Frame = { type: "msg", seq: op.seq, body: op.body, ts: op.ts };
      if (op.events.length > 0) {
        frame.events = op.events.map((ev) => [ev[0], ev[1], ev[2]]);
      }
      return frame;
    }
    return { type: "replay", seq: op.seq, message_id: op.messageId };
  }
}
