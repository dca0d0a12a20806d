/**
 * Quiz screen rendering. The whole view is a pure function of the last
 * received frame plus the connection status, so it can be tested as
 * string snapshots without a browser.
 */

export interface AnswerOption {
  label: string;
  color: string;
}

export interface QuestionFrame {
  type: "question";
  index: number;
  total: number;
  text: string;
  answers: AnswerOption[];
}

export interface FeedbackFrame {
  type: "feedback";
  correct: boolean;
  segment: number;
  message: string;
}

export interface FinishedFrame {
  type: "finished";
  correct_count: number;
  total: number;
}

export type HubFrame = QuestionFrame | FeedbackFrame | FinishedFrame;

export type ConnectionStatus = "connecting" | "connected" | "lost";

export interface ViewState {
  status: ConnectionStatus;
  /** Last question seen; feedback renders on top of it. */
  question: QuestionFrame | null;
  feedback: FeedbackFrame | null;
  finished: FinishedFrame | null;
}

export const initialView: ViewState = {
  status: "connecting",
  question: null,
  feedback: null,
  finished: null,
};

/** Fold one hub frame into the view state. */
export function applyFrame(view: ViewState, frame: HubFrame): ViewState {
  switch (frame.type) {
    case "question":
      return { ...view, question: frame, feedback: null, finished: null };
    case "feedback":
      return { ...view, feedback: frame };
    case "finished":
      return { ...view, finished: frame };
    default:
      return view;
  }
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function answerBlocks(question: QuestionFrame, feedback: FeedbackFrame | null): string {
  return question.answers
    .map((answer, segment) => {
      const pressed = feedback !== null && feedback.segment === segment;
      const classes = pressed ? "answer pressed" : "answer";
      return (
        `<div class="${classes}" data-segment="${segment}" data-color="${answer.color}"` +
        ` style="background:${answer.color}">${escapeHtml(answer.label)}</div>`
      );
    })
    .join("");
}

export function render(view: ViewState): string {
  const banner =
    view.status === "lost"
      ? '<div class="banner lost">connection lost, retrying…</div>'
      : "";

  if (view.finished !== null) {
    const { correct_count, total } = view.finished;
    return (
      banner +
      '<div class="finished"><h1>Quiz finished!</h1>' +
      `<p class="score">${correct_count} / ${total} correct</p></div>`
    );
  }

  if (view.question === null || view.status !== "connected") {
    return banner + '<div class="waiting"><p>waiting for quiz…</p></div>';
  }

  const question = view.question;
  const feedbackHtml =
    view.feedback === null
      ? ""
      : `<div class="feedback ${view.feedback.correct ? "correct" : "wrong"}">` +
        `${escapeHtml(view.feedback.message)}</div>`;

  return (
    banner +
    `<div class="progress">${question.index} / ${question.total}</div>` +
    `<h1 class="question">${escapeHtml(question.text)}</h1>` +
    `<div class="answers">${answerBlocks(question, view.feedback)}</div>` +
    feedbackHtml
  );
}
