package com.example.notes;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.view.View;
import android.widget.EditText;
import android.widget.TextView;

import java.text.SimpleDateFormat;
import java.util.Date;

public class NoteActivity extends Activity {
    private static final String EXTRA_ID = "note_id";
    private EditText body;
    private long noteId;

    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.activity_note);
        body = (EditText) findViewById(R.id.note_body);
        TextView stamp = (TextView) findViewById(R.id.note_stamp);
        noteId = getIntent().getLongExtra(EXTRA_ID, -1);
        SimpleDateFormat format = new SimpleDateFormat("dd/MM/yyyy HH:mm");
        stamp.setText(format.format(new Date()));
        stamp.setVisibility(View.VISIBLE);
        findViewById(R.id.save_button).setOnClickListener(v -> save());
    }

    private void save() {
        NoteStore.save(this, noteId, body.getText().toString());
        Intent result = new Intent();
        result.putExtra("saved", true);
        setResult(RESULT_OK, result);
        finish();
    }
}
