use serde::{Deserialize, Serialize};

use super::{Stroke, TraceError};

pub const STROKE_DOCUMENT_VERSION: u32 = 1;

/// Versioned JSON container for a drawing session's strokes.
///
/// ```json
/// {"version": 1, "strokes": [
///   {"tool": "pencil", "category": 3, "thickness": 2, "points": [[4, 5], [9, 7]]}
/// ]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrokeDocument {
    pub version: u32,
    pub strokes: Vec<Stroke>,
}

impl StrokeDocument {
    pub fn new(strokes: Vec<Stroke>) -> Self {
        Self { version: STROKE_DOCUMENT_VERSION, strokes }
    }

    /// Parses and validates every stroke.
    pub fn from_json(text: &str) -> Result<Self, TraceError> {
        let doc: StrokeDocument = serde_json::from_str(text)?;
        if doc.version != STROKE_DOCUMENT_VERSION {
            return Err(TraceError::UnsupportedVersion(doc.version));
        }
        for s in &doc.strokes {
            s.validate()?;
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stroke documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::Tool;

    #[test]
    fn parses_the_documented_shape() {
        let doc = StrokeDocument::from_json(
            r#"{"version":1,"strokes":[{"tool":"pencil","category":3,"thickness":2,"points":[[4,5],[9,7]]},
                {"tool":"eraser","thickness":8,"points":[[0,0]]}]}"#,
        )
        .unwrap();
        assert_eq!(doc.strokes[0], Stroke::pencil(3, 2, vec![(4, 5), (9, 7)]));
        assert_eq!(doc.strokes[1].tool, Tool::Eraser);
        assert_eq!(StrokeDocument::from_json(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            StrokeDocument::from_json(r#"{"version":2,"strokes":[]}"#),
            Err(TraceError::UnsupportedVersion(2))
        ));
        assert!(matches!(
            StrokeDocument::from_json(r#"{"version":1,"strokes":[{"tool":"line","category":1,"thickness":1,"points":[[0,0]]}]}"#),
            Err(TraceError::DegenerateStroke { .. })
        ));
        assert!(matches!(StrokeDocument::from_json("{"), Err(TraceError::Document(_))));
        assert!(matches!(
            StrokeDocument::from_json(r#"{"version":1,"strokes":[{"tool":"brush","thickness":1,"points":[[0,0]]}]}"#),
            Err(TraceError::Document(_))
        ));
    }
}
