// Conversation state: ordered messages with decoded segments, lookup by the
// wire message reference, and replay routing. Rendering is delegated to
// hooks so the model stays testable without a DOM.

import { decodeBody, hasEmoticon, type Segment } from "./codec.js";
import type { Delivery, MessageRef, PendingOp } from "./protocol.js";

export interface ChatMessage {
  sender: string;
  ts: number;
  body: string;
  segments: Segment[];
  mine: boolean;
  /** Own messages keep their op until acked so the seq can arrive late. */
  op: PendingOp | null;
  seq: number | null;
}

export interface ChatHooks {
  onAppend?(message: ChatMessage): void;
  /** A replay fired (either party tapped): re-run the effects once. */
  onReplay?(message: ChatMessage): void;
}

export class ChatViewModel {
  readonly userId: string;
  readonly messages: ChatMessage[] = [];
  private readonly hooks: ChatHooks;

  constructor(userId: string, hooks: ChatHooks = {}) {
    this.userId = userId;
    this.hooks = hooks;
  }

  appendOwn(op: PendingOp): ChatMessage {
    const message: ChatMessage = {
      sender: this.userId,
      ts: op.ts,
      body: op.body,
      segments: decodeBody(op.body),
      mine: true,
      op,
      seq: op.seq,
    };
    this.messages.push(message);
    this.hooks.onAppend?.(message);
    return message;
  }

  applyDelivery(delivery: Delivery): ChatMessage | null {
    if (delivery.kind === "replay_event") {
      const target = this.find(delivery.messageId);
      if (target) this.hooks.onReplay?.(target);
      return target;
    }
    const message: ChatMessage = {
      sender: delivery.sender,
      ts: delivery.ts,
      body: delivery.body,
      segments: decodeBody(delivery.body),
      mine: false,
      op: null,
      seq: delivery.seq,
    };
    this.messages.push(message);
    this.hooks.onAppend?.(message);
    return message;
  }

  /** The wire reference for a message, or null while an own send is
   * unnumbered (offline and not yet through a session). */
  refOf(message: ChatMessage): MessageRef | null {
    const seq = message.mine ? message.op?.seq ?? message.seq : message.seq;
    if (seq === null || seq === undefined) return null;
    return [message.sender, seq];
  }

  find(ref: MessageRef): ChatMessage | null {
    for (const message of this.messages) {
      const own = this.refOf(message);
      if (own && own[0] === ref[0] && own[1] === ref[1]) return message;
    }
    return null;
  }

  /** Replay is only meaningful for emoticon-bearing, numbered messages. */
  replayable(message: ChatMessage): boolean {
    return hasEmoticon(message.segments) && this.refOf(message) !== null;
  }
}
