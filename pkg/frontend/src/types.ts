// Wire types shared with the service: the version-1 template document and
// the run/chat response shapes.

export type NodeKindName =
  | "text_input"
  | "prompt"
  | "prompt_with_context"
  | "visualise";

export interface ParamsDoc {
  temperature: number;
  max_tokens: number;
}

export interface NodeDoc {
  id: string;
  kind: NodeKindName;
  label: string;
  body: string;
  params?: ParamsDoc;
  position: { x: number; y: number };
}

export interface EdgeDoc {
  id: string;
  source: string;
  source_handle: string;
  target: string;
  target_handle: string;
}

export interface TemplateDoc {
  version: 1;
  name: string;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface TextOutputDoc {
  type: "text";
  content: string;
}

export interface ImageOutputDoc {
  type: "image";
  image_id: string;
  media_type: string;
  url: string;
}

export type OutputDoc = TextOutputDoc | ImageOutputDoc;

export interface RunResultDoc {
  outputs: Record<string, OutputDoc>;
  order: string[];
  durations_ms: Record<string, number>;
  errors: Record<string, { code: string; message: string }>;
}

export interface NodeKindInfo {
  kind: NodeKindName;
  description: string;
  inputs: string[];
  outputs: string[];
  default_params?: ParamsDoc;
}

export interface ChatTurnDoc {
  role: "user" | "assistant";
  type: "text" | "image";
  content?: string;
  image_id?: string;
  media_type?: string;
  url?: string;
}

export const INPUT_HANDLES: Record<NodeKindName, string[]> = {
  text_input: [],
  prompt: ["input"],
  prompt_with_context: ["input", "context"],
  visualise: ["prompt"],
};

export const OUTPUT_HANDLES: Record<NodeKindName, string[]> = {
  text_input: ["output"],
  prompt: ["output"],
  prompt_with_context: ["output"],
  visualise: ["image"],
};

export const DEFAULT_PARAMS: ParamsDoc = { temperature: 0.7, max_tokens: 256 };
